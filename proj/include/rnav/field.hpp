#pragma once

#include <memory>
#include <string>
#include <utility>

#include "rnav/linalg.hpp"

namespace rnav {

// A smooth function R^dim -> R that can be evaluated at double and at every
// nested dual type used by the library (up to third order).
class ScalarField {
 public:
  ScalarField() = default;

  // fn must be a generic callable: template <class T> T fn(const Vec<T>&).
  template <class Fn>
  static ScalarField make(int dim, Fn fn, std::string name = {}) {
    ScalarField f;
    f.impl_ = std::make_shared<Model<Fn>>(std::move(fn));
    f.dim_ = dim;
    f.name_ = std::move(name);
    return f;
  }

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  bool valid() const { return impl_ != nullptr; }

  template <class T>
  T operator()(const Vec<T>& x) const {
    if (x.size() != dim_) throw InvalidArgument("scalar field '" + name_ + "' expects dimension " + std::to_string(dim_));
    return impl_->eval(x);
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual double eval(const Vec<double>&) const = 0;
    virtual D1 eval(const Vec<D1>&) const = 0;
    virtual D2 eval(const Vec<D2>&) const = 0;
    virtual D3 eval(const Vec<D3>&) const = 0;
  };
  template <class Fn>
  struct Model final : Concept {
    explicit Model(Fn f) : fn(std::move(f)) {}
    double eval(const Vec<double>& x) const override { return fn(x); }
    D1 eval(const Vec<D1>& x) const override { return fn(x); }
    D2 eval(const Vec<D2>& x) const override { return fn(x); }
    D3 eval(const Vec<D3>& x) const override { return fn(x); }
    Fn fn;
  };

  std::shared_ptr<const Concept> impl_;
  int dim_ = 0;
  std::string name_;
};

// A smooth map R^in -> R^out with the same evaluation types as ScalarField.
class VectorMap {
 public:
  VectorMap() = default;

  template <class Fn>
  static VectorMap make(int in_dim, int out_dim, Fn fn, std::string name = {}) {
    VectorMap m;
    m.impl_ = std::make_shared<Model<Fn>>(std::move(fn));
    m.in_ = in_dim;
    m.out_ = out_dim;
    m.name_ = std::move(name);
    return m;
  }

  int in_dim() const { return in_; }
  int out_dim() const { return out_; }
  const std::string& name() const { return name_; }
  bool valid() const { return impl_ != nullptr; }

  template <class T>
  Vec<T> operator()(const Vec<T>& u) const {
    if (u.size() != in_) throw InvalidArgument("map '" + name_ + "' expects dimension " + std::to_string(in_));
    return impl_->eval(u);
  }

 private:
  struct Concept {
    virtual ~Concept() = default;
    virtual Vec<double> eval(const Vec<double>&) const = 0;
    virtual Vec<D1> eval(const Vec<D1>&) const = 0;
    virtual Vec<D2> eval(const Vec<D2>&) const = 0;
    virtual Vec<D3> eval(const Vec<D3>&) const = 0;
  };
  template <class Fn>
  struct Model final : Concept {
    explicit Model(Fn f) : fn(std::move(f)) {}
    Vec<double> eval(const Vec<double>& x) const override { return fn(x); }
    Vec<D1> eval(const Vec<D1>& x) const override { return fn(x); }
    Vec<D2> eval(const Vec<D2>& x) const override { return fn(x); }
    Vec<D3> eval(const Vec<D3>& x) const override { return fn(x); }
    Fn fn;
  };

  std::shared_ptr<const Concept> impl_;
  int in_ = 0;
  int out_ = 0;
  std::string name_;
};

// Gradient of f at x, one forward sweep per coordinate.
template <class T>
Vec<T> gradient(const ScalarField& f, const Vec<T>& x) {
  const int n = x.size();
  Vec<T> g(n);
  for (int i = 0; i < n; ++i) g[i] = f(seed(x, Vec<T>::unit(n, i))).d;
  return g;
}

// Columns are the partial derivatives d map / d u^a.
template <class T>
Mat<T> jacobian(const VectorMap& map, const Vec<T>& u) {
  const int m = u.size();
  Mat<T> jac(map.out_dim(), m);
  for (int a = 0; a < m; ++a) jac.set_col(a, tangent(map(seed(u, Vec<T>::unit(m, a)))));
  return jac;
}

}  // namespace rnav
