#include <stdio.h>
#include <string.h>
#include "syntomic.h"

#define CHECK(x) do { if (!(x)) { fprintf(stderr, "failed: %s\n", #x); return 1; } } while (0)

int main(void) {
    SynAlgebra *alg = NULL;
    CHECK(syn_algebra_new(2, "O", &alg) == SYN_STATUS_OK);
    SynElement *x = NULL;
    CHECK(syn_element_parse(alg, "Sq2 Sq2", &x) == SYN_STATUS_OK);
    char *s = NULL;
    CHECK(syn_element_to_text(x, &s) == SYN_STATUS_OK);
    CHECK(strcmp(s, "tau Sq3 Sq1") == 0);
    syn_string_free(s);

    SynElement *bad = NULL;
    CHECK(syn_element_parse(alg, "Sq2 Foo", &bad) == SYN_STATUS_PARSE);
    CHECK(bad == NULL);
    CHECK(syn_last_error() != NULL);

    size_t h0 = 0, h1 = 0;
    CHECK(syn_gauge_sections(2, 1, 0, &h0, &h1) == SYN_STATUS_OK);
    CHECK(h0 == 1 && h1 == 1);

    syn_element_free(x);
    syn_algebra_free(alg);
    puts("ok");
    return 0;
}
