#pragma once

#include <gmpxx.h>

namespace hpre::internal {

// All modular exponentiations in the library funnel through this wrapper so
// that modexp_count() reflects the true cost of every operation.
mpz_class powmod(const mpz_class& base, const mpz_class& exp, const mpz_class& mod);

}  // namespace hpre::internal
