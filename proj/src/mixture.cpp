#include "manip/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace manip {

namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

struct ComponentCache {
    Eigen::LLT<Matrix> llt;
    double log_norm = 0.0;  // -0.5 log((2 pi)^dim det cov)

    explicit ComponentCache(const GmmSpdComponent& comp) {
        llt.compute(sym(comp.cov));
        if (llt.info() != Eigen::Success)
            throw DomainError("mixture: joint covariance is singular after regularization");
        double log_det = 0.0;
        const Matrix l = llt.matrixL();
        for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
        log_norm = -0.5 * (static_cast<double>(comp.joint_dim()) * kLogTwoPi + log_det);
    }

    double log_density(const Vector& residual) const {
        return log_norm - 0.5 * residual.dot(llt.solve(residual));
    }
};

Vector joint_residual(const GmmSpdComponent& comp, const Vector& input, const Vector& tangent_row) {
    Vector r(comp.joint_dim());
    r.head(comp.d_in()) = input - comp.mean_in;
    r.tail(tangent_row.size()) = tangent_row;
    return r;
}

double log_sum_exp(const Vector& v) {
    const double m = v.maxCoeff();
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) acc += std::exp(v(i) - m);
    return m + std::log(acc);
}

// Gaussian log density of the input block alone.
double input_log_pdf(const GmmSpdComponent& comp, const Vector& input) {
    const Matrix cii = sym(comp.cov_ii());
    Eigen::LLT<Matrix> llt(cii);
    if (llt.info() != Eigen::Success) throw DomainError("mixture: singular input covariance");
    double log_det = 0.0;
    const Matrix l = llt.matrixL();
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    const Vector d = input - comp.mean_in;
    return -0.5 * (static_cast<double>(d.size()) * kLogTwoPi + log_det + d.dot(llt.solve(d)));
}

}  // namespace

void GmmSpdModel::validate() const {
    if (components.empty()) throw DomainError("GmmSpdModel: needs at least one component");
    double prior_sum = 0.0;
    for (const GmmSpdComponent& c : components) {
        if (!(c.prior > 0.0 && c.prior <= 1.0)) throw DomainError("GmmSpdModel: priors must lie in (0, 1]");
        if (c.mean_in.size() != d_in || c.mean_out.dim() != d_out)
            throw ShapeError("GmmSpdModel: component dimensions disagree with the model");
        if (c.cov.rows() != c.joint_dim() || c.cov.cols() != c.joint_dim())
            throw ShapeError("GmmSpdModel: joint covariance has the wrong size");
        require_symmetric(c.cov, 1e-9, "joint covariance");
        Eigen::SelfAdjointEigenSolver<Matrix> es(sym(c.cov), Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, es.eigenvalues().maxCoeff()))
            throw DomainError("GmmSpdModel: joint covariance is not PSD");
        prior_sum += c.prior;
    }
    if (std::abs(prior_sum - 1.0) > 1e-10) throw DomainError("GmmSpdModel: priors must sum to 1");
}

double log_pdf(const SpdDatapoint& point, const GmmSpdComponent& comp) {
    if (point.input.size() != comp.d_in() || point.output.dim() != comp.d_out())
        throw ShapeError("log_pdf: dimension mismatch");
    const ComponentCache cache(comp);
    const Vector tangent = mandel_vec(log_map(comp.mean_out, point.output));
    return cache.log_density(joint_residual(comp, point.input, tangent));
}

namespace {

std::vector<std::size_t> sorted_by_input(const std::vector<SpdDatapoint>& data) {
    std::vector<std::size_t> idx(data.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        const Vector& va = data[a].input;
        const Vector& vb = data[b].input;
        for (Eigen::Index i = 0; i < va.size(); ++i) {
            if (va(i) < vb(i)) return true;
            if (va(i) > vb(i)) return false;
        }
        return false;
    });
    return idx;
}

GmmSpdComponent fit_weighted(const std::vector<SpdDatapoint>& data, const Vector& weights,
                             const EmOptions& opts) {
    const double total = weights.sum();

    Vector mean_in = Vector::Zero(data[0].input.size());
    for (std::size_t i = 0; i < data.size(); ++i)
        mean_in += (weights(static_cast<Eigen::Index>(i)) / total) * data[i].input;

    std::vector<SpdMatrix> outputs;
    outputs.reserve(data.size());
    for (const SpdDatapoint& p : data) outputs.push_back(p.output);
    const SpdMatrix mean_out =
        batch::karcher_mean(outputs, weights / total, opts.karcher, opts.exec);

    GmmSpdComponent comp{0.0, mean_in, mean_out, Matrix()};
    const Matrix tangents = batch::tangent_coordinates(mean_out, outputs, opts.exec);
    const Eigen::Index jd = comp.joint_dim();
    Matrix cov = Matrix::Zero(jd, jd);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Vector r = joint_residual(comp, data[i].input, tangents.row(static_cast<Eigen::Index>(i)));
        cov += (weights(static_cast<Eigen::Index>(i)) / total) * (r * r.transpose());
    }
    comp.cov = sym(cov) + opts.regularization * Matrix::Identity(jd, jd);
    return comp;
}

}  // namespace

GmmSpdModel em_fit(const std::vector<SpdDatapoint>& data, int k, unsigned seed,
                   const EmOptions& opts, EmDiagnostics* diagnostics) {
    (void)seed;  // the k-bins initialization is already deterministic
    const Eigen::Index n = static_cast<Eigen::Index>(data.size());
    if (k < 1) throw DomainError("em_fit: k must be at least 1");
    if (n < 2 * k) throw DataError("em_fit: need at least 2K datapoints");

    GmmSpdModel model;
    model.d_in = static_cast<int>(data[0].input.size());
    model.d_out = static_cast<int>(data[0].output.dim());
    for (const SpdDatapoint& p : data)
        if (p.input.size() != model.d_in || p.output.dim() != model.d_out)
            throw ShapeError("em_fit: datapoints disagree in dimension");

    // K contiguous bins over the input-sorted data.
    const auto order = sorted_by_input(data);
    for (int b = 0; b < k; ++b) {
        const Eigen::Index lo = n * b / k;
        const Eigen::Index hi = n * (b + 1) / k;
        Vector w = Vector::Zero(n);
        for (Eigen::Index i = lo; i < hi; ++i) w(static_cast<Eigen::Index>(order[static_cast<std::size_t>(i)])) = 1.0;
        GmmSpdComponent comp = fit_weighted(data, w, opts);
        comp.prior = static_cast<double>(hi - lo) / static_cast<double>(n);
        model.components.push_back(std::move(comp));
    }

    std::vector<SpdMatrix> outputs;
    outputs.reserve(data.size());
    for (const SpdDatapoint& p : data) outputs.push_back(p.output);

    double prev_ll = -std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        // E-step: per-point component log densities via the batched tangent kernel.
        Matrix log_joint(n, k);
        for (int c = 0; c < k; ++c) {
            const GmmSpdComponent& comp = model.components[static_cast<std::size_t>(c)];
            const ComponentCache cache(comp);
            const Matrix tangents = batch::tangent_coordinates(comp.mean_out, outputs, opts.exec);
            for (Eigen::Index i = 0; i < n; ++i) {
                const Vector r = joint_residual(comp, data[static_cast<std::size_t>(i)].input,
                                                tangents.row(i));
                log_joint(i, c) = std::log(comp.prior) + cache.log_density(r);
            }
        }

        double ll = 0.0;
        Matrix resp(n, k);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double lse = log_sum_exp(log_joint.row(i));
            ll += lse;
            for (int c = 0; c < k; ++c) resp(i, c) = std::exp(log_joint(i, c) - lse);
        }
        model.loglik_history.push_back(ll);
        if (ll - prev_ll < opts.tol && iter > 0) break;
        prev_ll = ll;

        // Empty components are re-seeded from the worst-fit datapoint.
        for (int c = 0; c < k; ++c) {
            const double nk = resp.col(c).sum();
            if (nk >= 1e-9 * static_cast<double>(n)) continue;
            Eigen::Index worst = 0;
            double worst_ll = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < n; ++i) {
                const double li = log_sum_exp(log_joint.row(i));
                if (li < worst_ll) {
                    worst_ll = li;
                    worst = i;
                }
            }
            resp.col(c).setZero();
            resp(worst, c) = 1.0;
            if (diagnostics)
                diagnostics->events.push_back("component " + std::to_string(c) +
                                              " re-seeded from datapoint " + std::to_string(worst));
        }

        // M-step.
        for (int c = 0; c < k; ++c) {
            const Vector w = resp.col(c);
            const double nk = w.sum();
            GmmSpdComponent comp = fit_weighted(data, w, opts);
            comp.prior = nk / static_cast<double>(n);
            model.components[static_cast<std::size_t>(c)] = std::move(comp);
        }
        double prior_sum = 0.0;
        for (const GmmSpdComponent& comp : model.components) prior_sum += comp.prior;
        for (GmmSpdComponent& comp : model.components) comp.prior /= prior_sum;
    }

    model.validate();
    return model;
}

GmrResult gmr_condition(const GmmSpdModel& model, const Vector& input, const GmrOptions& opts) {
    model.validate();
    if (input.size() != model.d_in) throw ShapeError("gmr_condition: input dimension mismatch");
    const int k = model.k();
    const Eigen::Index dt = mandel_dim(model.d_out);

    // Responsibilities from the Euclidean input marginals.
    Vector log_h(k);
    for (int c = 0; c < k; ++c) {
        const GmmSpdComponent& comp = model.components[static_cast<std::size_t>(c)];
        log_h(c) = std::log(comp.prior) + input_log_pdf(comp, input);
    }
    if (log_h.maxCoeff() < std::log(1e-300))
        throw DomainError("gmr_condition: input too far from the training range");
    const double lse = log_sum_exp(log_h);
    Vector h(k);
    for (int c = 0; c < k; ++c) h(c) = std::exp(log_h(c) - lse);

    // Mean iteration, started at the output mean of the dominant component.
    Eigen::Index dominant = 0;
    h.maxCoeff(&dominant);
    SpdMatrix mean = model.components[static_cast<std::size_t>(dominant)].mean_out;

    std::vector<Matrix> deltas(static_cast<std::size_t>(k));
    std::vector<Matrix> transports(static_cast<std::size_t>(k));
    bool converged = false;
    double residual = 0.0;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        Matrix update = Matrix::Zero(model.d_out, model.d_out);
        for (int c = 0; c < k; ++c) {
            const GmmSpdComponent& comp = model.components[static_cast<std::size_t>(c)];
            const Matrix g = transport_mandel_matrix(comp.mean_out, mean);
            transports[static_cast<std::size_t>(c)] = g;
            const Matrix cross = g * comp.cov_oi();  // transported S_OI
            const Vector corr = cross * comp.cov_ii().ldlt().solve(input - comp.mean_in);
            const Matrix delta = log_map(mean, comp.mean_out) + mandel_fold(corr);
            deltas[static_cast<std::size_t>(c)] = delta;
            update += h(c) * delta;
        }
        residual = update.norm();
        if (residual < opts.tol) {
            converged = true;
            break;
        }
        mean = exp_map(mean, update);
    }
    if (!converged) throw ConvergenceError("gmr_condition: mean iteration did not converge", residual);

    // Conditional covariance in the tangent space at the converged mean.
    Matrix cov = Matrix::Zero(dt, dt);
    for (int c = 0; c < k; ++c) {
        const GmmSpdComponent& comp = model.components[static_cast<std::size_t>(c)];
        const Matrix& g = transports[static_cast<std::size_t>(c)];
        const Matrix s_oo = g * comp.cov_oo() * g.transpose();
        const Matrix s_oi = g * comp.cov_oi();
        const Matrix schur = s_oo - s_oi * comp.cov_ii().ldlt().solve(s_oi.transpose());
        const Vector dv = mandel_vec(deltas[static_cast<std::size_t>(c)]);
        cov += h(c) * (schur + dv * dv.transpose());
    }
    if (opts.subtract_mean_outer) {
        const Vector mv = mandel_vec(mean.matrix());
        cov -= mv * mv.transpose();
    }

    // PSD projection by eigenvalue clamping.
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(cov));
    Vector ev = es.eigenvalues().cwiseMax(0.0);
    cov = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();

    GmrResult result{mean, mandel_fold4(sym(cov)), h};
    return result;
}

}  // namespace manip
