#include <math.h>
#include <stdio.h>
#include <string.h>

#include "bloch_scope.h"

#define CHECK(cond)                                                        \
    do {                                                                   \
        if (!(cond)) {                                                     \
            fprintf(stderr, "%s:%d: check failed: %s (%s)\n", __FILE__,    \
                    __LINE__, #cond, bs_last_error_message());             \
            return 1;                                                      \
        }                                                                  \
    } while (0)

int main(void) {
    BsSymbol *identity = NULL;
    BsSymbol *bad = NULL;
    BsWeight *v1 = NULL;
    BsWeight *log_weight = NULL;

    CHECK(strlen(bs_version()) > 0);
    CHECK(bs_symbol_parse("identity", &identity) == BS_STATUS_OK);
    CHECK(bs_weight_parse("valpha:1", &v1) == BS_STATUS_OK);
    CHECK(bs_weight_parse("log", &log_weight) == BS_STATUS_OK);

    CHECK(bs_symbol_parse("mobius(1+0i)", &bad) == BS_STATUS_INVALID_INPUT);
    CHECK(bad == NULL);
    CHECK(strstr(bs_last_error_message(), "position 7") != NULL);

    BsComplex z = {0.5, -0.25};
    BsComplex value, derivative;
    CHECK(bs_symbol_eval(identity, z, &value, &derivative) == BS_STATUS_OK);
    CHECK(value.re == 0.5 && value.im == -0.25);
    CHECK(derivative.re == 1.0 && derivative.im == 0.0);

    BsComplex outside = {1.0, 0.0};
    CHECK(bs_symbol_eval(identity, outside, &value, NULL) == BS_STATUS_INVALID_INPUT);

    BsOptions opts = bs_options_default();
    opts.depth = 12;
    opts.eps_boundary = 1e-3;
    opts.angles = 4;
    opts.k_max = 10;
    opts.j_max = 32;

    BsNorm norm;
    CHECK(bs_bloch_norm(identity, v1, &opts, &norm) == BS_STATUS_OK);
    CHECK(fabs(norm.total - 1.0) < 1e-9);

    BsEssentialBounds bounds;
    CHECK(bs_essential_bounds(identity, 1.0, v1, &opts, &bounds) == BS_STATUS_OK);
    CHECK(fabs(bounds.l - 0.5) < 1e-3);
    CHECK(bounds.verdict == BS_VERDICT_NON_COMPACT);

    double zhao = 0.0;
    CHECK(bs_zhao_estimate(identity, 1.0, log_weight, &opts, &zhao) == BS_STATUS_UNSUPPORTED_WEIGHT);

    char *text = bs_symbol_to_string(identity);
    CHECK(text != NULL && strcmp(text, "identity") == 0);
    bs_string_free(text);

    bs_symbol_free(identity);
    bs_weight_free(v1);
    bs_weight_free(log_weight);
    printf("ok\n");
    return 0;
}
