#include <stdio.h>
#include <string.h>
#include "tm.h"

static const char *MODEL =
    "static {\n"
    "  thimac A { create release transfer }\n"
    "  thimac B { transfer receive process }\n"
    "  flow A.create -> A.release\n"
    "  flow A.release -> A.transfer\n"
    "  flow A.transfer -> B.transfer\n"
    "  flow B.transfer -> B.receive\n"
    "  flow B.receive -> B.process\n"
    "}\n";

int main(void) {
    TmDocument *doc = NULL;
    char *out = NULL;
    if (tm_document_parse(MODEL, &doc) != TM_STATUS_OK) {
        fprintf(stderr, "parse: %s\n", tm_last_error());
        return 1;
    }
    if (tm_document_validate_json(doc, &out) != TM_STATUS_OK) return 2;
    tm_string_free(out);
    if (tm_render(doc, "static-full", &out) != TM_STATUS_OK) return 3;
    if (strstr(out, "cluster_A") == NULL) return 4;
    tm_string_free(out);
    tm_document_free(doc);

    if (tm_document_parse("static {", &doc) != TM_STATUS_SYNTAX) return 5;
    if (tm_last_error() == NULL) return 6;
    puts("ok");
    return 0;
}
