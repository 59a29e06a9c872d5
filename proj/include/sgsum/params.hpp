#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>

#include "sgsum/error.hpp"
#include "sgsum/tensor.hpp"

namespace sgsum {

using Gradients = std::map<std::string, Tensor>;

// Named trainable tensors plus the optimizer's moment accumulators.
class ParamStore {
 public:
  void add(const std::string& name, Tensor value) {
    SGSUM_CHECK(!params_.count(name), "ParamStore: duplicate parameter '", name, "'");
    first_moment_.emplace(name, Tensor(value.shape()));
    second_moment_.emplace(name, Tensor(value.shape()));
    params_.emplace(name, std::move(value));
  }

  bool contains(const std::string& name) const { return params_.count(name) > 0; }

  const Tensor& get(const std::string& name) const {
    auto it = params_.find(name);
    SGSUM_CHECK(it != params_.end(), "ParamStore: unknown parameter '", name, "'");
    return it->second;
  }

  Tensor& get_mutable(const std::string& name) {
    auto it = params_.find(name);
    SGSUM_CHECK(it != params_.end(), "ParamStore: unknown parameter '", name, "'");
    return it->second;
  }

  const std::map<std::string, Tensor>& params() const { return params_; }
  std::map<std::string, Tensor>& params() { return params_; }
  std::map<std::string, Tensor>& first_moment() { return first_moment_; }
  std::map<std::string, Tensor>& second_moment() { return second_moment_; }

  std::size_t step() const { return step_; }
  void increment_step() { ++step_; }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : params_) n += t.size();
    return n;
  }

  Gradients zero_gradients() const {
    Gradients g;
    for (const auto& [name, t] : params_) g.emplace(name, Tensor(t.shape()));
    return g;
  }

 private:
  std::map<std::string, Tensor> params_;
  std::map<std::string, Tensor> first_moment_;
  std::map<std::string, Tensor> second_moment_;
  std::size_t step_ = 0;
};

}  // namespace sgsum
