#include "counterfax/cli.hpp"

int main(int argc, char** argv)
{
    return counterfax::run({argv + 1, argv + argc});
}
