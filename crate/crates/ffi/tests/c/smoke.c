#include <math.h>
#include <stdio.h>
#include <string.h>

#include "alpha_lomax.h"

#define CHECK(cond)                                              \
    do {                                                         \
        if (!(cond)) {                                           \
            fprintf(stderr, "%s:%d: %s\n", __FILE__, __LINE__, #cond); \
            return 1;                                            \
        }                                                        \
    } while (0)

int main(void) {
    AlomaxChannel *ch = NULL;
    CHECK(alomax_channel_new(1.0, 2.0, 10.0, &ch) == ALOMAX_STATUS_OK);

    double op = 0.0;
    CHECK(alomax_outage(ch, 1.0, &op) == ALOMAX_STATUS_OK);
    CHECK(fabs(op - 0.1735537190082645) < 1e-15);

    double zeta = 0.0;
    CHECK(alomax_channel_zeta(ch, &zeta) == ALOMAX_STATUS_OK);
    CHECK(fabs(zeta - 1.0) < 1e-14);

    double buf[64];
    CHECK(alomax_sample_inverse(ch, 1, buf, 64) == ALOMAX_STATUS_OK);
    for (int i = 0; i < 64; i++) CHECK(buf[i] >= 0.0);

    AlomaxMetricConfig cfg = {1.0, 1.0, 100, 50};
    AlomaxEstimate est;
    CHECK(alomax_estimate(ch, ALOMAX_METRIC_BER, &cfg, 2, 10000, 2, &est) == ALOMAX_STATUS_OK);
    CHECK(est.n_used == 10000 && est.ci95_low <= est.mean && est.mean <= est.ci95_high);
    alomax_channel_free(ch);

    AlomaxChannel *bad = NULL;
    CHECK(alomax_channel_new(0.5, 1.0, 1.0, &bad) == ALOMAX_STATUS_INVALID_PARAMETER);
    CHECK(bad == NULL);
    CHECK(strstr(alomax_last_error(), "lambda") != NULL);
    puts("ok");
    return 0;
}
