#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "metarepo.h"

static char *slurp(const char *path) {
    FILE *f = fopen(path, "rb");
    if (!f) return NULL;
    fseek(f, 0, SEEK_END);
    long n = ftell(f);
    rewind(f);
    char *buf = malloc(n + 1);
    fread(buf, 1, n, f);
    buf[n] = 0;
    fclose(f);
    return buf;
}

int main(int argc, char **argv) {
    if (argc != 2) {
        fprintf(stderr, "usage: smoke FILE.arff\n");
        return 1;
    }
    char *text = slurp(argv[1]);
    if (!text) return 1;

    MrDataset *d = NULL;
    if (mr_dataset_parse(text, NULL, &d) != MR_STATUS_OK) {
        fprintf(stderr, "%s\n", mr_last_error_message());
        return 2;
    }
    free(text);

    size_t n = mr_metafeature_count();
    double *mf = malloc(n * sizeof(double));
    if (mr_dataset_metafeatures(d, 0, 10, mf, n) != MR_STATUS_OK) {
        fprintf(stderr, "%s\n", mr_last_error_message());
        return 2;
    }
    for (size_t i = 0; i < n; i++) {
        printf("%s=%.6f\n", mr_metafeature_name(i), mf[i]);
    }
    free(mf);
    mr_dataset_free(d);
    return 0;
}
