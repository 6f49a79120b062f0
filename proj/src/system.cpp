#include "switchbound/system.hpp"

#include <algorithm>
#include <set>

#include "switchbound/error.hpp"

namespace switchbound {

VectorField::VectorField(AffineField f) : dim_(static_cast<std::size_t>(f.b.size())) {
    if (f.A.rows() != f.b.size() || f.A.cols() != f.b.size())
        throw ValidationError("affine field: A must be n x n and b of length n");
    if (!f.A.allFinite() || !f.b.allFinite()) throw ValidationError("affine field: non-finite coefficient");
    field_ = std::move(f);
}

VectorField::VectorField(ExprField f) : dim_(f.components.size()) {
    for (const auto& c : f.components)
        if (c.empty()) throw ValidationError("expression field: empty component");
    field_ = std::move(f);
}

void VectorField::eval(const Vec& x, Vec& out) const {
    if (const auto* a = std::get_if<AffineField>(&field_)) {
        out.noalias() = a->A * x;
        out += a->b;
        return;
    }
    const auto& e = std::get<ExprField>(field_);
    const std::span<const double> values(x.data(), static_cast<std::size_t>(x.size()));
    for (std::size_t i = 0; i < e.components.size(); ++i)
        out[static_cast<Eigen::Index>(i)] = e.components[i].eval(values);
}

Vec VectorField::operator()(const Vec& x) const {
    Vec out(x.size());
    eval(x, out);
    return out;
}

SwitchedSystem::SwitchedSystem(std::size_t dim, std::vector<std::string> mode_names,
                               std::vector<VectorField> fields)
    : dim_(dim), names_(std::move(mode_names)), fields_(std::move(fields)) {
    if (dim_ == 0) throw ValidationError("state dimension must be positive");
    if (fields_.empty()) throw ValidationError("a switched system needs at least one mode");
    if (names_.size() != fields_.size()) throw ValidationError("one name per mode is required");
    std::set<std::string> seen;
    for (const auto& n : names_)
        if (n.empty() || !seen.insert(n).second) throw ValidationError("mode names must be unique and nonempty");
    for (std::size_t p = 0; p < fields_.size(); ++p)
        if (fields_[p].dim() != dim_)
            throw ValidationError("mode '" + names_[p] + "' has a vector field of the wrong dimension");
}

Mode SwitchedSystem::mode_index(const std::string& name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw ValidationError("unknown mode '" + name + "'");
    return static_cast<Mode>(it - names_.begin());
}

bool SwitchedSystem::all_affine() const noexcept {
    return std::all_of(fields_.begin(), fields_.end(), [](const VectorField& f) { return f.is_affine(); });
}

std::vector<std::string> state_variable_names(std::size_t dim) {
    std::vector<std::string> names;
    for (std::size_t i = 1; i <= dim; ++i) names.push_back("x" + std::to_string(i));
    return names;
}

}  // namespace switchbound
