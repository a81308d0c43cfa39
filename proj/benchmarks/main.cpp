#include <benchmark/benchmark.h>

// The distro's benchmark_main archive carries LTO bytecode tied to one GCC
// release, so the entry point is compiled here instead.
BENCHMARK_MAIN();
