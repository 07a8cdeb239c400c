// cli.hpp -- the counterfax command line

#pragma once

#include <iostream>
#include <string>
#include <vector>

namespace counterfax {

/// Exit codes: 0 success, 1 partial or runtime failure, 2 usage error.
int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr);

} // namespace counterfax
