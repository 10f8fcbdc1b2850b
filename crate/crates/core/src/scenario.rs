//! placeholder
pub struct Preset;
pub struct RunArtifacts;
pub struct ScenarioConfig;
pub fn run_scenario() {}
