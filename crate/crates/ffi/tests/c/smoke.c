#include <stdio.h>
#include <string.h>
#include "nilsson.h"

#define CHECK(cond) do { if (!(cond)) { fprintf(stderr, "failed: %s (%s)\n", #cond, nilsson_last_error_message()); return 1; } } while (0)

int main(void) {
    NilssonRecurrence *rec = NULL;
    NilssonExpansion *e = NULL;
    char *json = NULL;
    double x = 0.0, im = 0.0;
    size_t order = 0;

    CHECK(nilsson_recurrence_builtin("apery", &rec) == NILSSON_STATUS_OK);
    CHECK(nilsson_recurrence_order(rec, &order) == NILSSON_STATUS_OK && order == 2);
    CHECK(nilsson_recurrence_unroll_json(rec, 0, 4, &json) == NILSSON_STATUS_OK);
    CHECK(strstr(json, "\"33001\"") != NULL);
    nilsson_string_free(json);

    CHECK(nilsson_recurrence_analyze(rec, 4, 128, &e) == NILSSON_STATUS_OK);
    CHECK(nilsson_expansion_to_json(e, &json) == NILSSON_STATUS_OK);
    CHECK(strstr(json, "\"minpoly\"") != NULL);
    nilsson_string_free(json);
    CHECK(nilsson_expansion_partial_sum(e, "3/2", 0, 100, 64, &x, &im) == NILSSON_STATUS_OK);
    CHECK(x > 0.0);
    nilsson_expansion_free(e);
    nilsson_recurrence_free(rec);

    CHECK(nilsson_beta_integral("1/2", 0, 0, 128, &x) == NILSSON_STATUS_OK);
    CHECK(x > 3.14159265358 && x < 3.14159265360);
    CHECK(nilsson_polygamma(0, "-1", 64, &x) == NILSSON_STATUS_INVALID_INPUT);
    CHECK(strlen(nilsson_last_error_message()) > 0);
    printf("ok %s\n", nilsson_version());
    return 0;
}
