#pragma once

#include <string_view>

// Default data tables compiled in from data/.
namespace codebench::embedded {

std::string_view language_profiles_json();
std::string_view import_mapping_json();
std::string_view python_builtins_txt();

}  // namespace codebench::embedded
