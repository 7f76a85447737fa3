#include <cstdio>
int main() { std::puts("hslab cli placeholder"); return 0; }
