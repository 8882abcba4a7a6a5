#pragma once

#include <string>

namespace gtpm {

// Classic Porter suffix-stripping stemmer (the 1980 rule set).
// Operates on lowercase ASCII words; words shorter than three letters or
// containing non [a-z] characters are returned unchanged.
std::string porter_stem(const std::string& word);

// porter_stem applied until the output stops changing. The single-pass
// stemmer is not idempotent (e.g. "conflated" -> "conflate" -> "conflat");
// the fixpoint is, which keeps re-normalization stable.
std::string porter_stem_fixpoint(const std::string& word);

}  // namespace gtpm
