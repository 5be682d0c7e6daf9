/* Flat C interface over the knowledge-base engine.
 *
 * Knowledge bases are referred to by integer handles. Every call returns an
 * lkb_status; on failure lkb_last_error() holds the message for the calling
 * thread. Data crosses the boundary as UTF-8 JSON:
 *   values      42 or "Belgium"
 *   tuples      [1, 2] (a bare value is a 1-tuple)
 *   types       [v, ...]
 *   predicates  [tuple, ...]
 *   functions   [[tuple, v], ...] or {"key": v, ...} for unary functions;
 *               an object key spelling an integer ("3") stands for that integer
 *   constants   v
 * Strings returned through char** are owned by the caller and released with
 * lkb_string_free. A knowledge base must not be used from two threads at
 * once; distinct handles are independent.
 */
#ifndef LAZYKB_C_API_H
#define LAZYKB_C_API_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef int64_t lkb_handle;

typedef enum lkb_status {
  LKB_OK = 0,
  LKB_ERR_PARSE = 1,
  LKB_ERR_TYPE = 2,
  LKB_ERR_DOMAIN = 3,
  LKB_ERR_UNSAT = 4,
  LKB_ERR_UNSUPPORTED = 5,
  LKB_ERR_INVALID_HANDLE = 6,
  LKB_ERR_INVALID_ARGUMENT = 7,
  LKB_ERR_INTERNAL = 8
} lkb_status;

typedef enum lkb_kind { LKB_TYPE = 0, LKB_PREDICATE = 1, LKB_FUNCTION = 2, LKB_CONSTANT = 3 } lkb_kind;

const char* lkb_last_error(void);
void lkb_string_free(char* s);

int lkb_kb_new(const char* name, lkb_handle* out);
int lkb_kb_free(lkb_handle kb);

/* typed_name: "Area" for types, "Border(Area,Area)", "Coloring(Area): Color",
 * "C : Color". data_json may be NULL for an uninterpreted symbol. */
int lkb_declare(lkb_handle kb, int kind, const char* typed_name, const char* data_json);
int lkb_assign(lkb_handle kb, const char* name, const char* data_json);
int lkb_unassign(lkb_handle kb, const char* name);
int lkb_constraint(lkb_handle kb, const char* text);
/* lambdas_json: one lambda string or an array of them. */
int lkb_define(lkb_handle kb, const char* head_typed_name, const char* lambdas_json);
int lkb_load_script(lkb_handle kb, const char* text);

int lkb_satisfiable(lkb_handle kb, int* out);
int lkb_solver_invocations(lkb_handle kb, uint64_t* out);
/* JSON array of {"name": ..., "kind": ..., "signature": ..., "defined": bool}. */
int lkb_symbols(lkb_handle kb, char** out_json);

int lkb_relation_contains(lkb_handle kb, const char* name, const char* tuple_json, int* out);
int lkb_relation_add(lkb_handle kb, const char* name, const char* tuple_json);
int lkb_relation_remove(lkb_handle kb, const char* name, const char* tuple_json);
int lkb_relation_size(lkb_handle kb, const char* name, int64_t* out);
int lkb_relation_tuples(lkb_handle kb, const char* name, char** out_json);

int lkb_function_lookup(lkb_handle kb, const char* name, const char* args_json, char** out_json);
int lkb_function_keys(lkb_handle kb, const char* name, char** out_json);
int lkb_function_items(lkb_handle kb, const char* name, char** out_json);

/* Script-format dump of vocabulary, theory, definitions and structure;
 * lkb_load_script reads it back. */
int lkb_dump(lkb_handle kb, char** out);

#ifdef __cplusplus
}
#endif

#endif
