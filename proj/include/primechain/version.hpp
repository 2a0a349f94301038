#pragma once

#define PRIMECHAIN_VERSION_MAJOR 0
#define PRIMECHAIN_VERSION_MINOR 1
#define PRIMECHAIN_VERSION_PATCH 0
#define PRIMECHAIN_VERSION "0.1.0"
