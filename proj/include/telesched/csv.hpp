#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace telesched::csv {

/// Locale-independent, 12 significant digits, shortest general form.
/// NaN prints as an empty field, infinities as inf / -inf.
std::string format_number(double x);

/// Joins fields with ',' (no quoting: fields never contain commas).
std::string join_row(const std::vector<std::string>& fields);

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// failed run never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace telesched::csv
