#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <string>

#include "coniso/grid.hpp"

namespace coniso {

/// Scalar function of the plane: either a closed form or a sampled field.
class FieldFunction {
public:
    FieldFunction() : fn_([](double, double) { return 0.0; }) {}
    FieldFunction(std::function<double(double, double)> fn) : fn_(std::move(fn)) {}

    double operator()(double x, double y) const { return fn_(x, y); }

    static FieldFunction zero() { return FieldFunction(); }
    static FieldFunction constant(double c) {
        return FieldFunction([c](double, double) { return c; });
    }
    static FieldFunction from_field(ScalarField f) {
        auto sp = std::make_shared<ScalarField>(std::move(f));
        return FieldFunction([sp](double x, double y) { return interpolate(*sp, x, y); });
    }
    static FieldFunction radial(std::function<double(double)> fr) {
        return FieldFunction(
            [fr = std::move(fr)](double x, double y) { return fr(std::hypot(x, y)); });
    }

private:
    std::function<double(double, double)> fn_;
};

/// Data of the singular conformal weight e^{v+g+h_alpha}: the cone order
/// alpha, the continuous subharmonic correction g, the measurable factor
/// V-hat with its bounds, and the comparison curvature K0. The curvature
/// K-hat is V-hat/2 pointwise.
struct ConformalWeight {
    double alpha = 0.0;
    FieldFunction g = FieldFunction::zero();
    FieldFunction vhat = FieldFunction::constant(1.0);
    double a_low = 1.0;
    double b_high = 1.0;
    double K0 = 0.5;
    bool vhat_is_one = true;  // enables exact specializations

    double h_alpha(double x, double y) const {
        return -2.0 * alpha * std::log(std::hypot(x, y));
    }
    double khat(double x, double y) const { return 0.5 * vhat(x, y); }

    void validate() const {
        if (!(alpha >= 0.0 && alpha < 1.0))
            throw std::invalid_argument("weight: alpha must lie in [0,1)");
        if (!(a_low > 0.0 && a_low <= b_high))
            throw std::invalid_argument("weight: need 0 < a_low <= b_high");
        if (!(K0 >= 0.0)) throw std::invalid_argument("weight: K0 must be >= 0");
    }

    static ConformalWeight unit(double alpha = 0.0, double K0 = 0.5) {
        ConformalWeight w;
        w.alpha = alpha;
        w.K0 = K0;
        return w;
    }
    static ConformalWeight with_vhat(double alpha, double c, double K0) {
        ConformalWeight w;
        w.alpha = alpha;
        w.vhat = FieldFunction::constant(c);
        w.a_low = w.b_high = c;
        w.K0 = K0;
        w.vhat_is_one = (c == 1.0);
        return w;
    }
};

}  // namespace coniso
