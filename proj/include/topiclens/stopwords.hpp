#pragma once

#include <span>
#include <string_view>

namespace topiclens::stopwords {

std::span<const std::string_view> spanish();
std::span<const std::string_view> english();

}  // namespace topiclens::stopwords
