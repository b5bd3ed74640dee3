#include <cstdio>

int main() {
    std::puts("sivtherm: CLI not wired yet");
    return 1;
}
