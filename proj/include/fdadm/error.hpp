// SPDX-License-Identifier: Apache-2.0

#ifndef FDADM_ERROR_HPP
#define FDADM_ERROR_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fdadm
{
    class Error : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    // Caller passed something outside an operation's precondition.
    class ArgumentError : public Error
    {
    public:
        using Error::Error;
    };

    // Parameter combination for which the quantity is undefined.
    class DomainError : public Error
    {
    public:
        using Error::Error;
    };

    // A truncated series or adaptive quadrature failed to reach its tolerance.
    // `estimate` is the best value obtained, `last_term` the magnitude of the last
    // contribution (series) or the error estimate (quadrature).
    class ConvergenceError : public Error
    {
    public:
        ConvergenceError(const std::string &what, double estimate, double last_term)
            : Error(what), estimate_(estimate), last_term_(last_term) {}

        double estimate() const noexcept { return estimate_; }
        double last_term() const noexcept { return last_term_; }

    private:
        double estimate_;
        double last_term_;
    };

    // Result failed an internal consistency check (e.g. non-real d_j, probability outside [0,1]).
    class NumericalError : public Error
    {
    public:
        using Error::Error;
    };

    using WarningSink = std::function<void(std::string_view)>;

    // Replaces the process-wide warning sink and returns the previous one. Default writes to stderr.
    WarningSink set_warning_sink(WarningSink sink);
    void warn(std::string_view message);
}

#endif
