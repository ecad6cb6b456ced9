#pragma once

#include <string>
#include <variant>

#include "falldet/knn.hpp"
#include "falldet/svm.hpp"

namespace falldet {

using AnyModel = std::variant<KnnModel, OneClassKnnModel, SvmModel>;

// Self-describing versioned text format; doubles round-trip exactly (%.17g).
void save_model(const std::string& path, const KnnModel& m);
void save_model(const std::string& path, const OneClassKnnModel& m);
void save_model(const std::string& path, const SvmModel& m);

AnyModel load_model(const std::string& path);

}  // namespace falldet
