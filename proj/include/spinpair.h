/* C interface to the spin-pair simulator. All entry points return a status
 * code; on anything but SPS_OK the message behind sps_last_error() explains
 * what went wrong. Handles are opaque and freed by their matching *_free.
 */
#ifndef SPINPAIR_H
#define SPINPAIR_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct sps_config sps_config;
typedef struct sps_report sps_report;

enum {
  SPS_OK = 0,
  SPS_ERR_CONFIG = 2,  /* schema violation, unknown key, bad preset, ... */
  SPS_ERR_RUNTIME = 3, /* execution failed; a partial report may still exist */
  SPS_ERR_CHECK = 4,   /* report produced but an acceptance band was missed */
  SPS_ERR_ARG = 5      /* null handle or malformed argument */
};

const char* sps_version(void);

/* Message of the most recent failure on this thread; never NULL. */
const char* sps_last_error(void);

/* --- configuration ----------------------------------------------------- */

int sps_config_parse(const char* text, sps_config** out);
int sps_config_load(const char* path, sps_config** out);

/* Baseline of a named study ("fig2a" ... "fig4", "witness") or "default". */
int sps_config_preset(const char* name, sps_config** out);

/* Applies one "section.key=value" assignment. */
int sps_config_set(sps_config* cfg, const char* assignment);

/* Canonical round-trippable text; free with sps_string_free. */
int sps_config_emit(const sps_config* cfg, char** out);

uint64_t sps_config_hash(const sps_config* cfg);
void sps_config_free(sps_config* cfg);

/* --- execution ----------------------------------------------------------*/

int sps_run_simulate(const sps_config* cfg, sps_report** out);

/* Runs the study named by campaign.preset. When a step fails mid-way the
 * partial report is still returned (status key "failed") together with
 * SPS_ERR_RUNTIME. */
int sps_run_campaign(const sps_config* cfg, sps_report** out);

/* --- analysis of emitted files ------------------------------------------*/

/* Sinusoid fit of a fringe table (columns phi_parity, parity, sigma, N). */
int sps_fit_records(const char* fringe_csv, sps_report** out);

/* Overlapping Allan deviation of the "value" (else last) column; tau0_s <= 0
 * falls back to 1 s per sample. */
int sps_adev(const char* records_csv, double tau0_s, sps_report** out);

/* Affine readout-fidelity fit of a calibration table (columns t_s and
 * fidelity, or the first two columns). */
int sps_calibrate(const char* table_csv, sps_report** out);

/* --- reports ------------------------------------------------------------*/

/* Full key = value rendering; free with sps_string_free. */
int sps_report_kv(const sps_report* rep, char** out);

size_t sps_report_table_count(const sps_report* rep);
int sps_report_table_name(const sps_report* rep, size_t index, char** out);
int sps_report_table_csv(const sps_report* rep, const char* name, char** out);

/* Writes report.kv plus one CSV per table under dir. */
int sps_report_write(const sps_report* rep, const char* dir);

/* 1 when every recorded band check passed (or none exist), else 0. */
int sps_report_checks_pass(const sps_report* rep);

/* Numeric scalar lookup; SPS_ERR_ARG when the key is missing or not a
 * number. */
int sps_report_scalar(const sps_report* rep, const char* key, double* out);

void sps_report_free(sps_report* rep);

void sps_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SPINPAIR_H */
