#include "fkmc/field.hpp"

#include <cmath>
#include <vector>

namespace fkmc {

ScalarField FieldSpec::magnitude_power(double p) const {
    ScalarField f;
    f.dim = dim;
    f.name = name + "|A|^" + std::to_string(p);
    if (!has_vector()) {
        f.eval = [](std::span<const double>) { return 0.0; };
        return f;
    }
    const VectorFn a = vector_potential;
    const int d = dim;
    f.eval = [a, d, p](std::span<const double> x) {
        std::vector<double> out(static_cast<std::size_t>(d));
        a(x, out);
        double n2 = 0.0;
        for (double c : out) n2 += c * c;
        return std::pow(n2, 0.5 * p);
    };
    if (abs_a_radial) {
        const auto prof = abs_a_radial;
        f.radial = [prof, p](double r) { return std::pow(std::abs(prof(r)), p); };
    }
    return f;
}

ScalarField FieldSpec::half_divergence_power(double p) const {
    ScalarField f;
    f.dim = dim;
    f.name = name + "|div/2|^" + std::to_string(p);
    if (!div_a) {
        f.eval = [](std::span<const double>) { return 0.0; };
        return f;
    }
    const ScalarFn d = div_a;
    f.eval = [d, p](std::span<const double> x) {
        return std::pow(std::abs(0.5 * d(x)), p);
    };
    return f;
}

ScalarField FieldSpec::potential_magnitude() const {
    ScalarField f;
    f.dim = dim;
    f.name = name + "|V|";
    if (!has_scalar()) {
        f.eval = [](std::span<const double>) { return 0.0; };
        return f;
    }
    const ScalarFn v = scalar_potential;
    f.eval = [v](std::span<const double> x) { return std::abs(v(x)); };
    if (abs_v_radial) {
        const auto prof = abs_v_radial;
        f.radial = [prof](double r) { return std::abs(prof(r)); };
        f.singular_origin = v_singular_origin;
    }
    return f;
}

} // namespace fkmc
