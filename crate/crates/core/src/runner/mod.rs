//! Scenario orchestration, record persistence and summaries.

pub mod config;
pub mod records;
pub mod sim;
pub mod summary;

pub use config::{Game, OutputFormat, Priors, RawConfig, ScenarioConfig, OUTPUT_DIR_ENV, PRESETS};
pub use records::{read_csv, read_json_lines, write_records, ChshRecord, EpdRecord, Records, CHSH_HEADER, EPD_HEADER};
pub use sim::{run_scenario, run_scenario_with, Execution};
pub use summary::{summarize_chsh, summarize_epd, ChshSimSummary, EpdEnding, EpdSimSummary, Summary};
