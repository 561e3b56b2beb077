#include <math.h>
#include <stdio.h>
#include <string.h>

#include "eproc.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    const char *config =
        "{\"method\": \"ui\", \"null\": {\"type\": \"convex_hull\", \"vertices\": [[0.5, 0.5]]}}";
    EprocProcess *p = NULL;
    CHECK(eproc_process_new(config, 0, &p) == EPROC_STATUS_OK);
    double lw = -1.0;
    CHECK(eproc_process_step_symbol(p, 0, &lw) == EPROC_STATUS_OK);
    CHECK(lw == 0.0);
    CHECK(eproc_process_step_symbol(p, 0, &lw) == EPROC_STATUS_OK);
    CHECK(fabs(lw - log(1.5)) < 1e-12);
    CHECK(eproc_process_step_symbol(p, 9, &lw) == EPROC_STATUS_INVALID_OBSERVATION);
    CHECK(eproc_last_error_message() != NULL);
    uint64_t n = 0;
    CHECK(eproc_process_steps(p, &n) == EPROC_STATUS_OK);
    CHECK(n == 2);
    eproc_process_free(p);

    double a[2] = {0.7, 0.3}, b[2] = {0.5, 0.5}, kl = 0.0;
    CHECK(eproc_kl_divergence(a, b, 2, &kl) == EPROC_STATUS_OK);
    CHECK(fabs(kl - (0.7 * log(1.4) + 0.3 * log(0.6))) < 1e-12);

    CHECK(eproc_process_new("{\"method\": 1}", 0, &p) == EPROC_STATUS_INVALID_ARGUMENT);
    CHECK(strlen(eproc_last_error_message()) > 0);
    puts("ok");
    return 0;
}
