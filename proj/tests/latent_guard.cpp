#include "rgg/latent.hpp"

int main() { return 0; }
