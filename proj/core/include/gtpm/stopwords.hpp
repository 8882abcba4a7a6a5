#pragma once

#include <string>
#include <unordered_set>

namespace gtpm {

// Built-in English stopword list (NLTK's 179-entry set).
const std::unordered_set<std::string>& default_stopwords();

// Loads one lowercase word per line; blank lines and lines starting
// with '#' are skipped.
std::unordered_set<std::string> load_stopwords(const std::string& path);

}  // namespace gtpm
