#include "netsyn/assemblies.hpp"

#include <algorithm>
#include <cmath>

#include "netsyn/slalg.hpp"

namespace netsyn {
namespace {

double block_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

AffineMatrix kron_expand(const Matrix& l, const AffineMatrix& a) {
  AffineMatrix out(kron(l, a.constant()));
  for (const auto& [k, m] : a.coeffs()) out.add_coeff(k, kron(l, m));
  return out;
}

AffineMatrix con(Matrix m) { return AffineMatrix(std::move(m)); }

AffineMatrix eye(int n) { return con(Matrix::Identity(n, n)); }

// Zero-initialized square middle grid for the given block heights.
AffineGrid zero_grid(const std::vector<int>& heights) {
  AffineGrid g(heights.size());
  for (size_t i = 0; i < heights.size(); ++i) {
    g[i].reserve(heights.size());
    for (size_t j = 0; j < heights.size(); ++j)
      g[i].push_back(AffineMatrix::zero(heights[i], heights[j]));
  }
  return g;
}

double closed_loop_scale(const ClosedLoopSystem& cl) {
  double s = 1.0;
  for (const Matrix* m :
       {&cl.A.d, &cl.B1.d, &cl.B2.d, &cl.C1.d, &cl.C2.d, &cl.D21.d})
    s = std::max(s, block_norm(*m));
  return s;
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0)) throw ModelError("gamma must be positive");
}

struct PerformanceBlock {
  AffineMatrix ww;  // -(1/gamma^2) I or -rho I
  AffineMatrix zz;  // I
};

PerformanceBlock dual_performance(int nw, int nz, double gamma,
                                  const DualVars& v,
                                  const AssemblyOptions& opts) {
  PerformanceBlock b{AffineMatrix::zero(nw, nw), eye(nz)};
  if (opts.rho_objective) {
    if (!v.has_rho) throw std::logic_error("rho variable was not declared");
    b.ww.add_coeff(v.rho.offset, -Matrix::Identity(nw, nw));
  } else {
    check_gamma(gamma);
    b.ww.add_constant(-(1.0 / (gamma * gamma)) * Matrix::Identity(nw, nw));
  }
  return b;
}

}  // namespace

double problem_scale(const SubsystemPlant& p) {
  double s = 1.0;
  for (const Matrix* m : {&p.A, &p.B_u, &p.B_w, &p.B_p, &p.C_z, &p.D_zu,
                          &p.D_zw, &p.D_zp, &p.C_q, &p.D_qu})
    s = std::max(s, block_norm(*m));
  return s;
}

Matrix dual_mc_full(const Matrix& p_dense, const MultiplierAssignment& m) {
  const int nn = static_cast<int>(p_dense.rows());
  const int nq = static_cast<int>(m.Q_d.rows());
  const Matrix i_n = Matrix::Identity(nn, nn);
  const Matrix pp = kron(p_dense, Matrix::Identity(nq, nq));
  auto ex = [&](const Matrix& d, const Matrix& i) {
    return kron(i_n, d) + kron(p_dense, i);
  };
  const Matrix q = ex(m.Q_d, m.Q_i);
  const Matrix s = ex(m.S_d, m.S_i);
  const Matrix r = ex(m.R_d, m.R_i);
  return q - s * pp - pp * s.transpose() + pp * r * pp;
}

Matrix dual_mc_at(double lambda, const MultiplierAssignment& m) {
  return m.Q_d + lambda * (m.Q_i - m.S_d.transpose() - m.S_d) +
         lambda * lambda * (-m.S_i.transpose() - m.S_i + m.R_d) +
         lambda * lambda * lambda * m.R_i;
}

LmiProblem assemble_fbsp_analysis(const ClosedLoopSystem& cl, double gamma,
                                  const AssemblyOptions& opts) {
  check_gamma(gamma);
  const auto& d = cl.dims;
  const int nn = cl.pattern.size();
  const int nx = nn * d.n;
  const int nq = nn * d.n_q();
  const int nw = nn * d.n_w;
  const int nz = nn * d.n_z;
  const double eps = opts.eps_scale * closed_loop_scale(cl);

  const Matrix pp = cl.interconnection();
  const Matrix a = expand(cl.A, cl.pattern);
  const Matrix b1 = expand(cl.B1, cl.pattern);
  const Matrix b2 = expand(cl.B2, cl.pattern);
  const Matrix c1 = expand(cl.C1, cl.pattern);
  const Matrix d11 = expand(cl.D11, cl.pattern);
  const Matrix d12 = expand(cl.D12, cl.pattern);
  const Matrix c2 = expand(cl.C2, cl.pattern);
  const Matrix d21 = expand(cl.D21, cl.pattern);
  const Matrix d22 = expand(cl.D22, cl.pattern);

  LmiProblem p;
  const auto vx = p.vars().declare("X", VarStructure::symmetric, nx, nx);
  const auto vq = p.vars().declare("Q", VarStructure::symmetric, nq, nq);
  const auto vs = p.vars().declare("S", VarStructure::full, nq, nq);
  const auto vr = p.vars().declare("R", VarStructure::symmetric, nq, nq);
  const AffineMatrix x = p.vars().matrix(vx);
  const AffineMatrix q = p.vars().matrix(vq);
  const AffineMatrix s = p.vars().matrix(vs);
  const AffineMatrix r = p.vars().matrix(vr);

  {
    AffineGrid outer = {{con(pp)}, {eye(nq)}};
    AffineGrid mid = {{q, s}, {s.transpose(), r}};
    p.require_psd("mc", quad_form(outer, mid), eps);
  }
  {
    AffineGrid outer = {
        {eye(nx), AffineMatrix::zero(nx, nq), AffineMatrix::zero(nx, nw)},
        {con(a), con(b1), con(b2)},
        {AffineMatrix::zero(nq, nx), eye(nq), AffineMatrix::zero(nq, nw)},
        {con(c1), con(d11), con(d12)},
        {AffineMatrix::zero(nw, nx), AffineMatrix::zero(nw, nq), eye(nw)},
        {con(c2), con(d21), con(d22)}};
    AffineGrid mid = zero_grid({nx, nx, nq, nq, nw, nz});
    mid[0][1] = x;
    mid[1][0] = x;
    mid[2][2] = q;
    mid[2][3] = s;
    mid[3][2] = s.transpose();
    mid[3][3] = r;
    mid[4][4] = con(-(gamma * gamma) * Matrix::Identity(nw, nw));
    mid[5][5] = eye(nz);
    p.require_nsd("nominal", quad_form(outer, mid), eps);
  }
  p.require_psd("x_pd", x, eps);
  return p;
}

LmiProblem assemble_primal_efbsp(const ClosedLoopSystem& cl, double gamma,
                                 const AssemblyOptions& opts) {
  check_gamma(gamma);
  const auto& d = cl.dims;
  const int nn = cl.pattern.size();
  const int nx = nn * d.n;
  const int nq = nn * d.n_q();
  const int nw = nn * d.n_w;
  const int nz = nn * d.n_z;
  const double eps = opts.eps_scale * closed_loop_scale(cl);

  const Matrix pp = cl.interconnection();
  const Matrix a = expand(cl.A, cl.pattern);
  const Matrix b1 = expand(cl.B1, cl.pattern);
  const Matrix b2 = expand(cl.B2, cl.pattern);
  const Matrix c1 = expand(cl.C1, cl.pattern);
  const Matrix d11 = expand(cl.D11, cl.pattern);
  const Matrix d12 = expand(cl.D12, cl.pattern);
  const Matrix c2 = expand(cl.C2, cl.pattern);
  const Matrix d21 = expand(cl.D21, cl.pattern);
  const Matrix d22 = expand(cl.D22, cl.pattern);

  LmiProblem p;
  const auto vx = p.vars().declare("X", VarStructure::symmetric, nx, nx);
  const auto vf = p.vars().declare("F", VarStructure::full, nx, nx);
  const auto vq = p.vars().declare("Q", VarStructure::symmetric, nq, nq);
  const auto vs = p.vars().declare("S", VarStructure::full, nq, nq);
  const auto vr = p.vars().declare("R", VarStructure::symmetric, nq, nq);
  const AffineMatrix x = p.vars().matrix(vx);
  const AffineMatrix f = p.vars().matrix(vf);
  const AffineMatrix q = p.vars().matrix(vq);
  const AffineMatrix s = p.vars().matrix(vs);
  const AffineMatrix r = p.vars().matrix(vr);

  {
    AffineGrid outer = {{con(pp)}, {eye(nq)}};
    AffineGrid mid = {{q, s}, {s.transpose(), r}};
    p.require_psd("mc", quad_form(outer, mid), eps);
  }
  {
    const AffineMatrix zxq = AffineMatrix::zero(nx, nq);
    const AffineMatrix zxw = AffineMatrix::zero(nx, nw);
    const AffineMatrix zxx = AffineMatrix::zero(nx, nx);
    AffineGrid outer = {
        {eye(nx), zxx, zxq, zxw},
        {zxx, eye(nx), zxq, zxw},
        {con(a), zxx, con(b1), con(b2)},
        {con(a), zxx, con(b1), con(b2)},
        {AffineMatrix::zero(nq, nx), AffineMatrix::zero(nq, nx), eye(nq),
         AffineMatrix::zero(nq, nw)},
        {con(c1), AffineMatrix::zero(nq, nx), con(d11), con(d12)},
        {AffineMatrix::zero(nw, nx), AffineMatrix::zero(nw, nx),
         AffineMatrix::zero(nw, nq), eye(nw)},
        {con(c2), AffineMatrix::zero(nz, nx), con(d21), con(d22)}};
    AffineGrid mid = zero_grid({nx, nx, nx, nx, nq, nq, nw, nz});
    mid[0][1] = x - f;
    mid[0][2] = f;
    mid[1][0] = x - f.transpose();
    mid[1][1] = -f - f.transpose();
    mid[1][3] = f;
    mid[2][0] = f.transpose();
    mid[3][1] = f.transpose();
    mid[4][4] = q;
    mid[4][5] = s;
    mid[5][4] = s.transpose();
    mid[5][5] = r;
    mid[6][6] = con(-(gamma * gamma) * Matrix::Identity(nw, nw));
    mid[7][7] = eye(nz);
    p.require_nsd("nominal", quad_form(outer, mid), eps);
  }
  p.require_psd("x_pd", x, eps);
  p.require_psd("f_pos", f + f.transpose(), eps);
  return p;
}

DualVars declare_dual_vars(LmiProblem& p, const Dimensions& dims,
                           const AssemblyOptions& opts) {
  const int n = dims.n;
  const int nq = dims.n_q();
  const bool pairs = !opts.blockdiag;
  DualVars v;
  v.Y = p.vars().declare(
      "Y", pairs ? VarStructure::symmetric_pair : VarStructure::symmetric, n, n);
  v.F = p.vars().declare("F", VarStructure::full, n, n);
  if (!opts.force_zero_gain) {
    v.M = p.vars().declare("M", VarStructure::full, 2 * dims.n_u, n);
    v.has_m = true;
  }
  v.Q = p.vars().declare(
      "Qt", pairs ? VarStructure::symmetric_pair : VarStructure::symmetric, nq,
      nq);
  v.S = p.vars().declare(
      "St", pairs ? VarStructure::full_pair : VarStructure::full, nq, nq);
  // The convexified multiplier option pins the interaction part of Rt to
  // zero by declaring a plain symmetric variable.
  const bool r_pair = pairs && !opts.extremes;
  v.R = p.vars().declare(
      "Rt", r_pair ? VarStructure::symmetric_pair : VarStructure::symmetric, nq,
      nq);
  if (opts.rho_objective) {
    v.rho = p.vars().declare("rho", VarStructure::full, 1, 1);
    v.has_rho = true;
  }
  return v;
}

namespace {

// Interaction part, or a zero matrix for plain-structured variables.
AffineMatrix part_or_zero(const VarTable& vars, const DecisionVar& v,
                          int which) {
  if (which == 1 && !v.is_pair()) return AffineMatrix::zero(v.rows, v.cols);
  return vars.part(v, which);
}

struct DualPieces {
  AffineMatrix f;       // local slack
  AffineMatrix m1, m2;  // gain substitution rows
  AffineMatrix af;      // A F + B_u M1 + B_ui M2
  AffineMatrix c1f;     // [F; M2]
  AffineMatrix c2f;     // C_z F + D_zu M1 + D_zui M2
};

DualPieces dual_pieces(const LmiProblem& p, const DualVars& v,
                       const SubsystemPlant& plant, const Dimensions& dims) {
  DualPieces out;
  out.f = p.vars().matrix(v.F);
  if (v.has_m) {
    const AffineMatrix m = p.vars().matrix(v.M);
    out.m1 = m.block(0, 0, dims.n_u, dims.n);
    out.m2 = m.block(dims.n_u, 0, dims.n_u, dims.n);
  } else {
    out.m1 = AffineMatrix::zero(dims.n_u, dims.n);
    out.m2 = AffineMatrix::zero(dims.n_u, dims.n);
  }
  const Matrix b_ui = plant.B_p.rightCols(dims.n_u);
  const Matrix d_zui = plant.D_zp.rightCols(dims.n_u);
  out.af = mul(plant.A, out.f) + mul(plant.B_u, out.m1) + mul(b_ui, out.m2);
  out.c1f = compose_blocks({{out.f}, {out.m2}});
  out.c2f =
      mul(plant.C_z, out.f) + mul(plant.D_zu, out.m1) + mul(d_zui, out.m2);
  return out;
}

}  // namespace

void add_shared_dual_constraints(LmiProblem& p, const DualVars& v,
                                 const SubsystemPlant& plant,
                                 const AssemblyOptions& opts) {
  const double eps = opts.eps_scale * problem_scale(plant);
  const AffineMatrix f = p.vars().matrix(v.F);
  p.require_psd("f_pos", f + f.transpose(), eps);
  if (opts.extremes) {
    const AffineMatrix s_i = part_or_zero(p.vars(), v.S, 1);
    const AffineMatrix r_d = p.vars().part(v.R, 0);
    p.require_psd("convexity", r_d - s_i - s_i.transpose(), 0.0);
  }
  if (opts.rho_objective) {
    if (!v.has_rho) throw std::logic_error("rho variable was not declared");
    const double cap = 1.0 / (opts.rho_gamma_floor * opts.rho_gamma_floor);
    AffineMatrix rho_cap(Matrix::Constant(1, 1, cap));
    rho_cap.add_coeff(v.rho.offset, -Matrix::Identity(1, 1));
    p.require_psd("rho_cap", rho_cap, 0.0);
    AffineMatrix rho_pos = AffineMatrix::zero(1, 1);
    rho_pos.add_coeff(v.rho.offset, Matrix::Identity(1, 1));
    p.require_psd("rho_pos", rho_pos, 0.0);
    p.set_objective_term(v.rho.offset, -1.0);
  }
}

void add_decomposed_constraints(LmiProblem& p, const DualVars& v,
                                const SubsystemPlant& plant, double lambda,
                                double gamma, const AssemblyOptions& opts,
                                const std::string& tag, bool add_nominal) {
  const Dimensions dims{static_cast<int>(plant.A.rows()),
                        static_cast<int>(plant.B_u.cols()),
                        static_cast<int>(plant.C_y.rows()),
                        static_cast<int>(plant.B_w.cols()),
                        static_cast<int>(plant.C_z.rows())};
  const int n = dims.n;
  const int nq = dims.n_q();
  const int nw = dims.n_w;
  const int nz = dims.n_z;
  const double eps = opts.eps_scale * problem_scale(plant);
  const VarTable& vars = p.vars();

  // Multiplier condition: the eigenvalue-instantiated polynomial form.
  {
    const AffineMatrix q_d = vars.part(v.Q, 0);
    const AffineMatrix q_i = part_or_zero(vars, v.Q, 1);
    const AffineMatrix s_d = vars.part(v.S, 0);
    const AffineMatrix s_i = part_or_zero(vars, v.S, 1);
    const AffineMatrix r_d = vars.part(v.R, 0);
    const AffineMatrix r_i = part_or_zero(vars, v.R, 1);
    AffineMatrix mc = q_d;
    mc = mc + (q_i - s_d.transpose() - s_d).scaled(lambda);
    mc = mc + (r_d - s_i.transpose() - s_i).scaled(lambda * lambda);
    mc = mc + r_i.scaled(lambda * lambda * lambda);
    p.require_nsd("mc@" + tag, mc, eps);
  }

  if (!add_nominal) return;

  const DualPieces dp = dual_pieces(p, v, plant, dims);
  const AffineMatrix y_l = vars.instantiate(v.Y, lambda);

  {
    const AffineMatrix z_nn = AffineMatrix::zero(n, n);
    const AffineMatrix z_nq = AffineMatrix::zero(n, nq);
    const AffineMatrix z_nz = AffineMatrix::zero(n, nz);
    Matrix b1(n, nq);
    b1 << plant.B_p.leftCols(n), plant.B_u;
    Matrix d21(nz, nq);
    d21 << plant.D_zp.leftCols(n), plant.D_zu;

    AffineGrid outer = {
        {(-dp.af).transpose(), z_nn, (-dp.c1f).transpose(),
         (-dp.c2f).transpose()},
        {(-dp.af).transpose(), z_nn, (-dp.c1f).transpose(),
         (-dp.c2f).transpose()},
        {eye(n), z_nn, z_nq, z_nz},
        {z_nn, eye(n), z_nq, z_nz},
        {con(-b1.transpose()), AffineMatrix::zero(nq, n),
         AffineMatrix::zero(nq, nq), con(-d21.transpose())},
        {AffineMatrix::zero(nq, n), AffineMatrix::zero(nq, n), eye(nq),
         AffineMatrix::zero(nq, nz)},
        {con(-plant.B_w.transpose()), AffineMatrix::zero(nw, n),
         AffineMatrix::zero(nw, nq), AffineMatrix::zero(nw, nz)},
        {AffineMatrix::zero(nz, n), AffineMatrix::zero(nz, n),
         AffineMatrix::zero(nz, nq), eye(nz)}};

    AffineGrid mid = zero_grid({n, n, n, n, nq, nq, nw, nz});
    mid[0][2] = eye(n);
    mid[1][3] = eye(n);
    mid[2][0] = eye(n);
    mid[3][1] = eye(n);
    mid[2][3] = dp.f - y_l;
    mid[3][2] = dp.f.transpose() - y_l;
    mid[3][3] = dp.f + dp.f.transpose();
    mid[4][4] = vars.instantiate(v.Q, lambda);
    mid[4][5] = vars.instantiate(v.S, lambda);
    mid[5][4] = vars.instantiate(v.S, lambda).transpose();
    mid[5][5] = vars.instantiate(v.R, lambda);
    PerformanceBlock perf = dual_performance(nw, nz, gamma, v, opts);
    mid[6][6] = perf.ww;
    mid[7][7] = perf.zz;
    p.require_psd("nc@" + tag, quad_form(outer, mid), eps);
  }

  p.require_psd("y_pd@" + tag, y_l, eps);
}

LmiProblem assemble_decomposed_conjunction(const SubsystemPlant& plant,
                                           const std::vector<double>& lambdas,
                                           double gamma,
                                           const AssemblyOptions& opts) {
  if (!opts.rho_objective) check_gamma(gamma);
  if (lambdas.empty())
    throw ModelError("decomposed assembly needs at least one eigenvalue");
  const Dimensions dims{static_cast<int>(plant.A.rows()),
                        static_cast<int>(plant.B_u.cols()),
                        static_cast<int>(plant.C_y.rows()),
                        static_cast<int>(plant.B_w.cols()),
                        static_cast<int>(plant.C_z.rows())};
  LmiProblem p;
  DualVars v = declare_dual_vars(p, dims, opts);
  add_shared_dual_constraints(p, v, plant, opts);
  for (size_t i = 0; i < lambdas.size(); ++i) {
    // Block-diagonal variables make the nominal condition and Lyapunov
    // positivity eigenvalue-independent; add them once.
    const bool nominal = !opts.blockdiag || i == 0;
    add_decomposed_constraints(p, v, plant, lambdas[i], gamma, opts,
                               "l" + std::to_string(i), nominal);
  }
  return p;
}

LmiProblem assemble_decomposed_efbsp(const SubsystemPlant& plant,
                                     double lambda, double gamma,
                                     const AssemblyOptions& opts) {
  return assemble_decomposed_conjunction(plant, {lambda}, gamma, opts);
}

LmiProblem assemble_dual_efbsp(const ClosedLoopSystem& cl,
                               const HomogeneousSystem& sys, double gamma,
                               bool structured, const AssemblyOptions& opts) {
  if (!opts.rho_objective) check_gamma(gamma);
  require_valid(sys);
  if (cl.pattern.adjacency != sys.pattern.adjacency)
    throw ModelError("closed-loop skeleton and system use different patterns");
  const SubsystemPlant plant = subsystem_plant(sys);
  const Dimensions& d = sys.dims;
  const int nn = sys.pattern.size();
  const int nx = nn * d.n;
  const int nq = nn * d.n_q();
  const int nw = nn * d.n_w;
  const int nz = nn * d.n_z;
  const Matrix p_dense = sys.pattern.dense();
  const Matrix pp = interconnection_matrix(sys.pattern, d.n_q());
  const Matrix i_net = Matrix::Identity(nn, nn);
  const double eps = opts.eps_scale * problem_scale(plant);

  LmiProblem p;
  DualVars v;
  if (structured) {
    v = declare_dual_vars(p, d, opts);
  } else {
    v.Y = p.vars().declare("Y", VarStructure::symmetric, nx, nx);
    v.F = p.vars().declare("F", VarStructure::full, d.n, d.n);
    if (!opts.force_zero_gain) {
      v.M = p.vars().declare("M", VarStructure::full, 2 * d.n_u, d.n);
      v.has_m = true;
    }
    v.Q = p.vars().declare("Qt", VarStructure::symmetric, nq, nq);
    v.S = p.vars().declare("St", VarStructure::full, nq, nq);
    v.R = p.vars().declare("Rt", VarStructure::symmetric, nq, nq);
    if (opts.rho_objective) {
      v.rho = p.vars().declare("rho", VarStructure::full, 1, 1);
      v.has_rho = true;
    }
  }

  const VarTable& vars = p.vars();
  const AffineMatrix y_exp = structured ? vars.expanded(v.Y, p_dense)
                                        : vars.matrix(v.Y);
  const AffineMatrix q_exp = structured ? vars.expanded(v.Q, p_dense)
                                        : vars.matrix(v.Q);
  const AffineMatrix s_exp = structured ? vars.expanded(v.S, p_dense)
                                        : vars.matrix(v.S);
  const AffineMatrix r_exp = structured ? vars.expanded(v.R, p_dense)
                                        : vars.matrix(v.R);
  const AffineMatrix f_exp = vars.expanded(v.F, p_dense);

  const DualPieces dp = dual_pieces(p, v, plant, d);
  const AffineMatrix af_exp = kron_expand(i_net, dp.af);
  const AffineMatrix c1f_exp = kron_expand(i_net, dp.c1f);
  const AffineMatrix c2f_exp = kron_expand(i_net, dp.c2f);

  Matrix b1_loc(d.n, d.n_q());
  b1_loc << plant.B_p.leftCols(d.n), plant.B_u;
  Matrix d21_loc(d.n_z, d.n_q());
  d21_loc << plant.D_zp.leftCols(d.n), plant.D_zu;
  const Matrix b1 = kron(i_net, b1_loc);
  const Matrix d21 = kron(i_net, d21_loc);
  const Matrix b2 = kron(i_net, plant.B_w);

  {
    const AffineMatrix z_xx = AffineMatrix::zero(nx, nx);
    const AffineMatrix z_xq = AffineMatrix::zero(nx, nq);
    const AffineMatrix z_xz = AffineMatrix::zero(nx, nz);
    AffineGrid outer = {
        {(-af_exp).transpose(), z_xx, (-c1f_exp).transpose(),
         (-c2f_exp).transpose()},
        {(-af_exp).transpose(), z_xx, (-c1f_exp).transpose(),
         (-c2f_exp).transpose()},
        {eye(nx), z_xx, z_xq, z_xz},
        {z_xx, eye(nx), z_xq, z_xz},
        {con(-b1.transpose()), AffineMatrix::zero(nq, nx),
         AffineMatrix::zero(nq, nq), con(-d21.transpose())},
        {AffineMatrix::zero(nq, nx), AffineMatrix::zero(nq, nx), eye(nq),
         AffineMatrix::zero(nq, nz)},
        {con(-b2.transpose()), AffineMatrix::zero(nw, nx),
         AffineMatrix::zero(nw, nq), AffineMatrix::zero(nw, nz)},
        {AffineMatrix::zero(nz, nx), AffineMatrix::zero(nz, nx),
         AffineMatrix::zero(nz, nq), eye(nz)}};

    AffineGrid mid = zero_grid({nx, nx, nx, nx, nq, nq, nw, nz});
    mid[0][2] = eye(nx);
    mid[1][3] = eye(nx);
    mid[2][0] = eye(nx);
    mid[3][1] = eye(nx);
    mid[2][3] = f_exp - y_exp;
    mid[3][2] = f_exp.transpose() - y_exp;
    mid[3][3] = f_exp + f_exp.transpose();
    mid[4][4] = q_exp;
    mid[4][5] = s_exp;
    mid[5][4] = s_exp.transpose();
    mid[5][5] = r_exp;
    PerformanceBlock perf = dual_performance(nw, nz, gamma, v, opts);
    mid[6][6] = perf.ww;
    mid[7][7] = perf.zz;
    p.require_psd("nc", quad_form(outer, mid), eps);
  }

  {
    AffineMatrix mc = q_exp - mul(s_exp, pp) - mul(pp, s_exp.transpose()) +
                      mul(pp, mul(r_exp, pp));
    p.require_nsd("mc", mc, eps);
  }

  p.require_psd("y_pd", y_exp, eps);
  AssemblyOptions shared = opts;
  shared.extremes = false;  // spectrum-extremes mode is a decomposed-path device
  add_shared_dual_constraints(p, v, plant, shared);
  return p;
}

}  // namespace netsyn
