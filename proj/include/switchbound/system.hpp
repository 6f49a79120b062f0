#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "switchbound/expr.hpp"

namespace switchbound {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Index into SwitchedSystem::modes().
using Mode = std::size_t;

/// f(x) = A x + b.
struct AffineField {
    Mat A;
    Vec b;
};

/// f_i(x) = components[i](x1..xn).
struct ExprField {
    std::vector<Expression> components;
};

/// One mode's vector field, affine or given by parsed expressions.
class VectorField {
public:
    VectorField(AffineField f);
    VectorField(ExprField f);

    /// Writes f(x) into out (out must already have x.size() entries).
    void eval(const Vec& x, Vec& out) const;
    [[nodiscard]] Vec operator()(const Vec& x) const;

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] bool is_affine() const noexcept { return std::holds_alternative<AffineField>(field_); }
    [[nodiscard]] const AffineField* affine() const noexcept { return std::get_if<AffineField>(&field_); }
    [[nodiscard]] const ExprField* expression() const noexcept { return std::get_if<ExprField>(&field_); }

private:
    std::variant<AffineField, ExprField> field_;
    std::size_t dim_ = 0;
};

/// Finite family of vector fields on R^n indexed by named modes.
class SwitchedSystem {
public:
    SwitchedSystem(std::size_t dim, std::vector<std::string> mode_names, std::vector<VectorField> fields);

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t mode_count() const noexcept { return fields_.size(); }
    [[nodiscard]] const std::vector<std::string>& modes() const noexcept { return names_; }
    [[nodiscard]] const std::string& mode_name(Mode p) const { return names_.at(p); }
    [[nodiscard]] Mode mode_index(const std::string& name) const;
    [[nodiscard]] const VectorField& field(Mode p) const { return fields_.at(p); }
    [[nodiscard]] bool all_affine() const noexcept;

private:
    std::size_t dim_;
    std::vector<std::string> names_;
    std::vector<VectorField> fields_;
};

/// Variable names x1..xn used by expression vector fields.
[[nodiscard]] std::vector<std::string> state_variable_names(std::size_t dim);

}  // namespace switchbound
