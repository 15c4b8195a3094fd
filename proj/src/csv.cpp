#include "singreg/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "singreg/errors.hpp"

namespace singreg {

std::string format_double(double value)
{
    char buf[64];
    const auto result = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
    return std::string(buf, result.ptr);
}

Eigen::ArrayXd make_grid(double x_min, double x_max, std::size_t steps, bool log_spaced)
{
    if (!(x_min > 0.0) || !(x_max > x_min))
        throw DomainError("grid needs 0 < x_min < x_max");
    if (steps < 2)
        throw DomainError("grid needs at least 2 points");
    const auto n = static_cast<Eigen::Index>(steps);
    Eigen::ArrayXd x(n);
    const double last = static_cast<double>(steps - 1);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double f = static_cast<double>(i) / last;
        x[i] = log_spaced ? x_min * std::pow(x_max / x_min, f)
                          : x_min + static_cast<double>(i) * ((x_max - x_min) / last);
    }
    x[0] = x_min;
    x[n - 1] = x_max;
    return x;
}

Eigen::ArrayXd parallel_map(const Eigen::ArrayXd& x, const std::function<double(double)>& f,
                            unsigned threads)
{
    Eigen::ArrayXd out(x.size());
    const auto n = static_cast<std::size_t>(x.size());
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            out[static_cast<Eigen::Index>(i)] = f(x[static_cast<Eigen::Index>(i)]);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t i = w; i < n; i += workers)
                        out[static_cast<Eigen::Index>(i)] = f(x[static_cast<Eigen::Index>(i)]);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);
    return out;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<Eigen::ArrayXd>& columns)
{
    for (std::size_t c = 0; c < header.size(); ++c)
        out << (c ? "," : "") << header[c];
    out << '\n';
    const Eigen::Index rows = columns.empty() ? 0 : columns.front().size();
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << format_double(columns[c][r]);
        out << '\n';
    }
}

} // namespace singreg
