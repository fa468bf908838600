#include "netsyn/model.hpp"

namespace netsyn {
namespace {

HomogeneousSystem bipartite_demo() {
  Dimensions d;
  d.n = 3;
  d.n_u = 1;
  d.n_y = 3;
  d.n_w = 1;
  d.n_z = 2;

  HomogeneousSystem sys;
  sys.dims = d;

  Eigen::MatrixXi p(6, 6);
  p << 0, 1, 0, 0, 1, 0,  //
      1, 0, 1, 1, 0, 1,   //
      0, 1, 0, 0, 1, 0,   //
      0, 1, 0, 0, 1, 0,   //
      1, 0, 1, 1, 0, 1,   //
      0, 1, 0, 0, 1, 0;
  sys.pattern = make_pattern(p);

  Matrix a_d(3, 3);
  a_d << 0.0, -0.2, 0.8,  //
      -0.9, -0.7, -0.4,   //
      -0.9, 0.5, -0.6;
  Matrix a_i(3, 3);
  a_i << 0.2, 0.1, -0.1,  //
      -0.4, -0.1, -1.0,   //
      -0.3, -0.1, 0.0;
  sys.A = {a_d, a_i};

  Matrix b_u(3, 1);
  b_u << 0.2, 0.2, -0.1;
  sys.B_u = DecomposableMatrix::diag_only(b_u);

  Matrix b_w(3, 1);
  b_w << 0.5, 0.5, 0.5;
  sys.B_w = DecomposableMatrix::diag_only(b_w);

  Matrix c_y(3, 3);
  c_y << 1.1, -2.1, -1.6,  //
      -0.3, -0.4, 0.5,     //
      0.7, -0.8, 0.3;
  sys.C_y = DecomposableMatrix::diag_only(c_y);
  sys.D_yw = DecomposableMatrix::zero(3, 1);

  Matrix c_z_d(2, 3);
  c_z_d << 0.8, 0.3, 0.3,  //
      -0.1, 0.1, -0.1;
  Matrix c_z_i(2, 3);
  c_z_i << 0.0, 0.0, 0.0,  //
      0.3, 0.2, 0.5;
  sys.C_z = {c_z_d, c_z_i};

  Matrix d_zu(2, 1);
  d_zu << 0.1, 0.9;
  sys.D_zu = DecomposableMatrix::diag_only(d_zu);
  sys.D_zw = DecomposableMatrix::zero(2, 1);
  return sys;
}

}  // namespace

HomogeneousSystem load_fixture(const std::string& name) {
  if (name == "paper-sec7") return bipartite_demo();
  throw ModelError("unknown fixture: " + name);
}

}  // namespace netsyn
