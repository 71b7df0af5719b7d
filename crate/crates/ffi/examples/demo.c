#include <stdio.h>
#include "tsld.h"
int main(void) {
  TsldProgram *p = NULL;
  if (tsld_program_parse("p(1).\nq(a).\nq(X) :- p(a).", &p) != TSLD_STATUS_OK) return 1;
  TsldVerdict v; char *json = NULL;
  tsld_diagnose_program(p, 64, &v, &json);
  printf("%d %s\n", v, json);
  tsld_string_free(json);
  if (tsld_program_parse("p(1", &p) != TSLD_STATUS_OK) printf("err: %s\n", tsld_last_error());
  tsld_program_free(p);
  return 0;
}
