#include "gridrel/perf.hpp"

#include "gridrel/text.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

namespace gridrel
{
    double failure_to_repair_ratio(const FailureProfile &p) noexcept
    {
        return p.lambda_per_hour / p.mu_per_hour;
    }

    double steady_state_availability(const FailureProfile &p) noexcept
    {
        return p.mu_per_hour / (p.lambda_per_hour + p.mu_per_hour);
    }

    ReliabilityLevel classify_reliability(double a)
    {
        if (!(a >= 0.0 && a <= 1.0))
        {
            std::ostringstream os;
            os << "availability " << a << " is outside [0, 1]";
            throw DomainError(os.str());
        }
        for (auto level : {ReliabilityLevel::High, ReliabilityLevel::Good, ReliabilityLevel::Medium,
                           ReliabilityLevel::Low})
            if (a >= band_lower_bound(level))
                return level;
        return ReliabilityLevel::Poor;
    }

    double SparseGenerator::at(std::size_t from, std::size_t to) const
    {
        if (from == to)
            return diagonal[from];
        const auto base = from * static_cast<std::size_t>(stride);
        double sum = 0.0;
        for (int k = 0; k < stride; ++k)
            if (target[base + k] == to)
                sum += rate[base + k];
        return sum;
    }

    std::vector<double> SparseGenerator::dense() const
    {
        if (size > 4096)
            throw std::length_error("dense generator copy requested for a large state space");
        std::vector<double> q(size * size, 0.0);
        for (std::size_t s = 0; s < size; ++s)
        {
            q[s * size + s] = diagonal[s];
            for (int k = 0; k < stride; ++k)
            {
                const auto e = s * stride + k;
                q[s * size + target[e]] += rate[e];
            }
        }
        return q;
    }

    namespace
    {
        void check_fleet(std::span<const GridNode> nodes, int cap)
        {
            if (cap > kMaxCtmcNodes)
                throw std::invalid_argument("CTMC node cap cannot exceed 16");
            if (nodes.empty())
                throw DomainError("system CTMC needs at least one node");
            if (static_cast<int>(nodes.size()) > cap)
            {
                std::ostringstream os;
                os << "system CTMC limited to " << cap << " nodes, got " << nodes.size();
                throw TooManyNodes(os.str());
            }
        }

        MarkovRewardModel allocate(std::span<const GridNode> nodes)
        {
            MarkovRewardModel m;
            m.node_count = static_cast<int>(nodes.size());
            const std::size_t n = std::size_t{1} << nodes.size();
            m.states.resize(n);
            m.rewards.resize(n);
            auto &q = m.generator;
            q.size = n;
            q.stride = m.node_count;
            q.target.resize(n * nodes.size());
            q.rate.resize(n * nodes.size());
            q.diagonal.resize(n);
            return m;
        }

        void fill_row(MarkovRewardModel &m, std::span<const GridNode> nodes, std::size_t s)
        {
            auto &q = m.generator;
            const auto state = static_cast<std::uint32_t>(s);
            m.states[s] = state;
            double out = 0.0;
            double reward = 0.0;
            for (int i = 0; i < m.node_count; ++i)
            {
                const auto bit = std::uint32_t{1} << i;
                const auto &node = nodes[static_cast<std::size_t>(i)];
                const auto e = s * static_cast<std::size_t>(q.stride) + static_cast<std::size_t>(i);
                q.target[e] = state ^ bit;
                if (state & bit)
                {
                    q.rate[e] = node.failure.lambda_per_sec();
                    reward += node.mips * (1.0 - node.failure.degradation);
                }
                else
                {
                    q.rate[e] = node.failure.mu_per_sec();
                }
                out += q.rate[e];
            }
            q.diagonal[s] = -out;
            m.rewards[s] = reward;
        }
    }

    MarkovRewardModel build_system_ctmc(std::span<const GridNode> nodes, int cap)
    {
        check_fleet(nodes, cap);
        auto m = allocate(nodes);
        const auto n = static_cast<std::int64_t>(m.size());
#pragma omp parallel for schedule(static)
        for (std::int64_t s = 0; s < n; ++s)
            fill_row(m, nodes, static_cast<std::size_t>(s));
        return m;
    }

    MarkovRewardModel build_system_ctmc_serial(std::span<const GridNode> nodes, int cap)
    {
        check_fleet(nodes, cap);
        auto m = allocate(nodes);
        for (std::size_t s = 0; s < m.size(); ++s)
            fill_row(m, nodes, s);
        return m;
    }

    namespace
    {
        // (pi Q)_j for every j, scattering row contributions.
        std::vector<double> left_multiply(const SparseGenerator &q, std::span<const double> pi)
        {
            std::vector<double> y(q.size, 0.0);
            for (std::size_t s = 0; s < q.size; ++s)
            {
                y[s] += pi[s] * q.diagonal[s];
                for (int k = 0; k < q.stride; ++k)
                {
                    const auto e = s * q.stride + k;
                    y[q.target[e]] += pi[s] * q.rate[e];
                }
            }
            return y;
        }

        // Incoming-rate form: (pi Q)_j = pi_j q_jj + sum over predecessors. Every
        // transition flips one bit, so predecessors of j are j ^ (1 << k) and the
        // matching slot in their row is k.
        double column_dot(const SparseGenerator &q, std::span<const double> pi, std::size_t j)
        {
            double acc = pi[j] * q.diagonal[j];
            for (int k = 0; k < q.stride; ++k)
            {
                const auto i = j ^ (std::size_t{1} << k);
                acc += pi[i] * q.rate[i * q.stride + k];
            }
            return acc;
        }
    }

    double residual_inf_norm(const SparseGenerator &q, std::span<const double> pi)
    {
        const auto n = static_cast<std::int64_t>(q.size);
        double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
        for (std::int64_t j = 0; j < n; ++j)
            worst = std::max(worst, std::abs(column_dot(q, pi, static_cast<std::size_t>(j))));
        return worst;
    }

    double residual_inf_norm_serial(const SparseGenerator &q, std::span<const double> pi)
    {
        double worst = 0.0;
        for (double v : left_multiply(q, pi))
            worst = std::max(worst, std::abs(v));
        return worst;
    }

    namespace
    {
        // Gaussian elimination with partial pivoting on A x = b, A row-major n x n.
        std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b, std::size_t n)
        {
            double scale = 0.0;
            for (double v : a)
                scale = std::max(scale, std::abs(v));
            const double tiny = scale * 1e-14;

            for (std::size_t col = 0; col < n; ++col)
            {
                std::size_t piv = col;
                for (std::size_t r = col + 1; r < n; ++r)
                    if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col]))
                        piv = r;
                if (!(std::abs(a[piv * n + col]) > tiny))
                    throw SingularSystem("steady-state system is singular (zero pivot)");
                if (piv != col)
                {
                    std::swap_ranges(a.begin() + static_cast<std::ptrdiff_t>(piv * n),
                                     a.begin() + static_cast<std::ptrdiff_t>((piv + 1) * n),
                                     a.begin() + static_cast<std::ptrdiff_t>(col * n));
                    std::swap(b[piv], b[col]);
                }
                const double p = a[col * n + col];
                for (std::size_t r = col + 1; r < n; ++r)
                {
                    const double f = a[r * n + col] / p;
                    if (f == 0.0)
                        continue;
                    for (std::size_t c = col; c < n; ++c)
                        a[r * n + c] -= f * a[col * n + c];
                    b[r] -= f * b[col];
                }
            }
            std::vector<double> x(n);
            for (std::size_t i = n; i-- > 0;)
            {
                double acc = b[i];
                for (std::size_t c = i + 1; c < n; ++c)
                    acc -= a[i * n + c] * x[c];
                x[i] = acc / a[i * n + i];
            }
            return x;
        }

        // Q^T with the last equation replaced by the normalisation row.
        std::vector<double> dense_steady_state(const SparseGenerator &q)
        {
            const std::size_t n = q.size;
            std::vector<double> a(n * n, 0.0);
            for (std::size_t s = 0; s < n; ++s)
            {
                a[s * n + s] = q.diagonal[s];
                for (int k = 0; k < q.stride; ++k)
                {
                    const auto e = s * q.stride + k;
                    a[q.target[e] * n + s] += q.rate[e];
                }
            }
            for (std::size_t c = 0; c < n; ++c)
                a[(n - 1) * n + c] = 1.0;
            std::vector<double> b(n, 0.0);
            b[n - 1] = 1.0;
            return dense_solve(std::move(a), std::move(b), n);
        }

        std::vector<double> gauss_seidel_steady_state(const SparseGenerator &q)
        {
            const std::size_t n = q.size;
            std::vector<double> pi(n, 1.0 / static_cast<double>(n));
            double rate_scale = 0.0;
            for (double d : q.diagonal)
                rate_scale = std::max(rate_scale, std::abs(d));
            const double target = std::min(kResidualTolerance * 1e-2, rate_scale * 1e-14);

            constexpr int kMaxSweeps = 20000;
            for (int sweep = 0; sweep < kMaxSweeps; ++sweep)
            {
                for (std::size_t j = 0; j < n; ++j)
                {
                    if (q.diagonal[j] == 0.0)
                        continue;
                    double inflow = 0.0;
                    for (int k = 0; k < q.stride; ++k)
                    {
                        const auto i = j ^ (std::size_t{1} << k);
                        inflow += pi[i] * q.rate[i * q.stride + k];
                    }
                    pi[j] = inflow / -q.diagonal[j];
                }
                double total = 0.0;
                for (double v : pi)
                    total += v;
                if (!(total > 0.0))
                    throw SingularSystem("Gauss-Seidel iterate collapsed to zero");
                for (double &v : pi)
                    v /= total;
                if (sweep % 8 == 7 && residual_inf_norm(q, pi) <= target)
                    return pi;
            }
            return pi;
        }
    }

    std::vector<double> solve_steady_state(MarkovRewardModel &model)
    {
        const auto &q = model.generator;
        if (q.size == 0)
            throw SingularSystem("empty generator");

        std::vector<double> pi = q.size <= kDenseSolveLimit ? dense_steady_state(q) : gauss_seidel_steady_state(q);

        // Round-off can leave entries like -1e-19 on states with no mass.
        double total = 0.0;
        for (double &v : pi)
        {
            if (!std::isfinite(v) || v < -1e-12)
                throw SingularSystem("steady-state solve produced an invalid probability");
            v = std::max(v, 0.0);
            total += v;
        }
        for (double &v : pi)
            v /= total;

        const double res = residual_inf_norm(q, pi);
        if (!(res < kResidualTolerance))
        {
            std::ostringstream os;
            os << "steady-state residual " << res << " exceeds " << kResidualTolerance;
            throw SingularSystem(os.str());
        }
        model.steady_state = pi;
        return pi;
    }

    double expected_reward_rate(const MarkovRewardModel &model)
    {
        if (model.steady_state.size() != model.rewards.size() || model.steady_state.empty())
            throw std::logic_error("expected_reward_rate: steady state not solved");
        double acc = 0.0;
        for (std::size_t i = 0; i < model.rewards.size(); ++i)
            acc += model.steady_state[i] * model.rewards[i];
        return acc;
    }

    SelectionReport selection_report(std::span<const GridNode> nodes)
    {
        if (nodes.empty())
            throw DomainError("selection report needs at least one node");

        std::vector<GridNode> sorted(nodes.begin(), nodes.end());
        std::sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) { return a.id < b.id; });

        SelectionReport rep;
        rep.rows.reserve(sorted.size());
        const SelectionRow *perf = nullptr;
        const SelectionRow *rel = nullptr;
        for (const auto &n : sorted)
        {
            SelectionRow row;
            row.node_id = n.id;
            row.mips = n.mips;
            row.lambda_per_hour = n.failure.lambda_per_hour;
            row.mu_per_hour = n.failure.mu_per_hour;
            row.failure_to_repair_ratio = failure_to_repair_ratio(n.failure);
            row.availability = steady_state_availability(n.failure);
            row.level = classify_reliability(row.availability);
            row.expected_reward_rate_mips = row.availability * n.mips * (1.0 - n.failure.degradation);
            rep.rows.push_back(row);
        }
        // Rows are id-ascending, so strict comparisons keep the lowest id on ties.
        for (const auto &row : rep.rows)
        {
            if (!perf || row.mips > perf->mips)
                perf = &row;
            if (!rel || row.failure_to_repair_ratio < rel->failure_to_repair_ratio)
                rel = &row;
        }
        rep.performance_pick = perf->node_id;
        rep.reliability_pick = rel->node_id;
        return rep;
    }

    void write_selection_csv(std::ostream &os, const SelectionReport &report)
    {
        os << kSelectionCsvHeader << '\n';
        for (const auto &r : report.rows)
        {
            os << r.node_id << ',' << format_number(r.mips) << ',' << format_number(r.lambda_per_hour) << ','
               << format_number(r.mu_per_hour) << ',' << format_number(r.failure_to_repair_ratio) << ','
               << format_number(r.availability) << ',' << to_string(r.level) << ','
               << format_number(r.expected_reward_rate_mips) << '\n';
        }
    }
}
