// Serial vs OpenMP timing for the batch kernels and the scenario runner.
#include <chrono>
#include <cstdio>
#include <random>

#include "manip/batch.hpp"
#include "manip/mixture.hpp"
#include "manip/scenario.hpp"

using namespace manip;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<SpdMatrix> random_spds(int count, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<SpdMatrix> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        Matrix t(2, 2);
        t(0, 0) = g(rng);
        t(1, 1) = g(rng);
        t(0, 1) = t(1, 0) = g(rng);
        out.push_back(exp_map(SpdMatrix::identity(2), t));
    }
    return out;
}

ScenarioConfig tracking_scenario(unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    ScenarioConfig cfg;
    cfg.robot = PlanarChain::uniform(4);
    cfg.initial_q = Vector(4);
    Vector q_target(4);
    for (int i = 0; i < 4; ++i) {
        cfg.initial_q(i) = u(rng);
        q_target(i) = u(rng);
    }
    cfg.target.from_config = q_target;
    cfg.controller.type = ControllerConfig::Type::VelocityMain;
    cfg.controller.gains.km = Gain::scalar(5.0);
    cfg.dt = 0.01;
    cfg.steps = 300;
    return cfg;
}

template <typename Fn>
double time_best_of(int reps, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        fn();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

}  // namespace

int main() {
    std::printf("%-34s %12s %12s %9s\n", "kernel", "serial [s]", "parallel [s]", "speedup");

    {
        const auto pts = random_spds(20000, 1);
        const SpdMatrix base = SpdMatrix::identity(2);
        Matrix serial_out, parallel_out;
        const double ts = time_best_of(3, [&] {
            serial_out = batch::tangent_coordinates(base, pts, batch::Exec::Serial);
        });
        const double tp = time_best_of(3, [&] {
            parallel_out = batch::tangent_coordinates(base, pts, batch::Exec::Parallel);
        });
        const bool same = serial_out == parallel_out;
        std::printf("%-34s %12.4f %12.4f %8.2fx  %s\n", "tangent_coordinates (20k pts)", ts, tp,
                    ts / tp, same ? "identical" : "MISMATCH");
    }

    {
        const auto pts = random_spds(20000, 2);
        const SpdMatrix base = SpdMatrix::identity(2);
        Vector serial_out, parallel_out;
        const double ts =
            time_best_of(3, [&] { serial_out = batch::distances_to(base, pts, batch::Exec::Serial); });
        const double tp = time_best_of(3, [&] {
            parallel_out = batch::distances_to(base, pts, batch::Exec::Parallel);
        });
        const bool same = serial_out == parallel_out;
        std::printf("%-34s %12.4f %12.4f %8.2fx  %s\n", "distances_to (20k pts)", ts, tp, ts / tp,
                    same ? "identical" : "MISMATCH");
    }

    {
        const auto pts = random_spds(5000, 3);
        const Vector w = Vector::Constant(5000, 1.0 / 5000.0);
        SpdMatrix serial_mean = SpdMatrix::identity(2), parallel_mean = SpdMatrix::identity(2);
        const double ts = time_best_of(3, [&] {
            serial_mean = batch::karcher_mean(pts, w, {}, batch::Exec::Serial);
        });
        const double tp = time_best_of(3, [&] {
            parallel_mean = batch::karcher_mean(pts, w, {}, batch::Exec::Parallel);
        });
        const bool same = serial_mean.matrix() == parallel_mean.matrix();
        std::printf("%-34s %12.4f %12.4f %8.2fx  %s\n", "karcher_mean (5k pts)", ts, tp, ts / tp,
                    same ? "identical" : "MISMATCH");
    }

    {
        std::vector<ScenarioConfig> configs;
        for (unsigned s = 0; s < 24; ++s) configs.push_back(tracking_scenario(s));
        std::vector<TrackingTrace> serial_traces, parallel_traces;
        const double ts =
            time_best_of(2, [&] { serial_traces = run_scenarios(configs, batch::Exec::Serial); });
        const double tp =
            time_best_of(2, [&] { parallel_traces = run_scenarios(configs, batch::Exec::Parallel); });
        bool same = serial_traces.size() == parallel_traces.size();
        for (std::size_t i = 0; same && i < serial_traces.size(); ++i)
            same = serial_traces[i].rows.back().q == parallel_traces[i].rows.back().q;
        std::printf("%-34s %12.4f %12.4f %8.2fx  %s\n", "run_scenarios (24 x 300 steps)", ts, tp,
                    ts / tp, same ? "identical" : "MISMATCH");
    }

    return 0;
}
