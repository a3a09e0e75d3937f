#pragma once

#include <string_view>

// Contents of the files under data/, compiled into the library.
namespace mathrender::data {

std::string_view whitelist_tsv();
std::string_view symbols_tsv();
std::string_view metrics_tsv();
std::string_view layout_conf();
std::string_view fallback_css();
std::string_view corpus_txt();

}  // namespace mathrender::data
