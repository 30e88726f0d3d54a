#include <stdio.h>
#include <stdlib.h>
#include "hutchinf.h"

int main(void) {
    if (hutchinf_abi_version() != HUTCHINF_ABI_VERSION) return 10;
    HutchinfSystem *sys = NULL;
    if (hutchinf_system_builtin("planar", &sys) != HUTCHINF_STATUS_OK) return 11;
    HutchinfAttractor *a = NULL;
    if (hutchinf_attractor_compute(sys, 0.05, &a) != HUTCHINF_STATUS_OK) return 12;
    size_t n = hutchinf_attractor_len(a) * hutchinf_attractor_dim(a);
    double *buf = malloc(n * sizeof(double));
    if (hutchinf_attractor_points(a, buf, n) != HUTCHINF_STATUS_OK) return 13;
    double err = 0.0;
    hutchinf_attractor_error(a, &err);
    printf("%zu %.6f\n", hutchinf_attractor_len(a), err);
    free(buf);
    hutchinf_attractor_free(a);
    hutchinf_system_free(sys);

    HutchinfSystem *bad = NULL;
    if (hutchinf_system_builtin("nope", &bad) != HUTCHINF_STATUS_INVALID_ARGUMENT) return 14;
    char msg[128];
    if (hutchinf_last_error(msg, sizeof msg) < 2) return 15;
    return 0;
}
