#pragma once

#include <span>
#include <string>

#include "aeromix/forest.hpp"
#include "aeromix/gbt.hpp"
#include "aeromix/linear.hpp"

namespace aeromix {

enum class ModelKind { Gbt, Rf, Linear };

// A loaded model of any supported kind behind one predict() call.
struct ModelBundle {
  ModelKind kind = ModelKind::Gbt;
  GBTModel gbt;
  RFModel rf;
  LinearModel linear;
  std::vector<std::string> feature_names;

  double predict(std::span<const double> features) const;
};

// Versioned text serialization ("aeromix-model v1"): a key = value header
// (kind, hyperparameters, seed, base score) followed by tree blocks as
// preorder node lists, or the coefficient list for linear models. Numeric
// fields round-trip bit-exactly.
void save_model(const GBTModel& model, const std::string& path);
void save_model(const RFModel& model, const std::string& path);
void save_model(const LinearModel& model, const std::vector<std::string>& feature_names,
                const std::string& path);

ModelBundle load_model(const std::string& path);

}  // namespace aeromix
