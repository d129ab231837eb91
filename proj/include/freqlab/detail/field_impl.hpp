#pragma once

#include <string>

#include "freqlab/fields.hpp"
#include "freqlab/geometry.hpp"

namespace freqlab::detail {

/// Internal polymorphic field backend. Implementations must be immutable
/// after construction; every method is const and thread safe.
class FieldImpl {
 public:
  virtual ~FieldImpl() = default;

  virtual int dim() const = 0;
  virtual const std::string& name() const = 0;

  virtual double value(const Point& x) const = 0;
  virtual Point gradient(const Point& x) const = 0;
  virtual double laplacian(const Point& x) const = 0;
  virtual Mat3 hessian(const Point& x) const = 0;
  virtual EvalBundle eval(const Point& x) const {
    return EvalBundle{value(x), gradient(x), laplacian(x)};
  }

  virtual bool admissible(const Point&) const { return true; }
  virtual bool ball_admissible(const Point&, double) const { return true; }
  virtual double inner_cutoff() const { return 0.0; }
  virtual double discretization_scale() const { return 0.0; }
  virtual Equation natural_equation() const = 0;
};

}  // namespace freqlab::detail
