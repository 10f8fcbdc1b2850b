//! Fixed-timestep physics of the two-tank water process.
//!
//! Water circulates in a closed loop between container 101 (reservoir) and
//! container 102 (the controlled vessel). Three flow paths exist:
//!
//! * the centrifugal pump M101 moves water 101 → 102 while commanded on,
//! * the ball valve M102 drains 102 → 101 while open,
//! * a passive return line trickles 102 → 101 at all times.
//!
//! All rates are constant, so the dynamics are piecewise linear and the
//! explicit Euler update is exact between clamp events (an empty source
//! container). Total volume is conserved to within floating-point rounding.

use thiserror::Error;

/// Total water in the loop, liters. Nothing enters or leaves.
pub const TOTAL_VOLUME: f64 = 10.0;
/// Initial reservoir volume (container 101), liters.
pub const INITIAL_VOL_101: f64 = 7.0;
/// Initial controlled volume (container 102), liters.
pub const INITIAL_VOL_102: f64 = 3.0;
/// Pump transfer rate 101 → 102, liters per minute.
pub const PUMP_RATE_LPM: f64 = 3.0;
/// Valve drain rate 102 → 101, liters per minute.
pub const VALVE_RATE_LPM: f64 = 6.0;
/// Passive return rate 102 → 101, liters per minute. This is what makes the
/// steady state oscillate instead of parking at the pump cut-off level.
pub const RETURN_RATE_LPM: f64 = 1.0;
/// Simulation timestep, seconds. Sensors are sampled every step.
pub const DT_S: f64 = 0.1;
/// Low float switch S111 on container 101 trips at or below this volume.
pub const S111_LEVEL: f64 = 0.5;
/// High float switch S112 on container 101 trips at or above this volume.
pub const S112_LEVEL: f64 = 9.5;
/// Hydrostatic pressure proxy, millibar per liter in container 102.
pub const PRESSURE_GAIN: f64 = 10.0;
/// Ambient water temperature baseline, degrees Celsius.
pub const TEMP_BASE_C: f64 = 20.0;
/// Amplitude of the slow ambient temperature drift, degrees Celsius.
pub const TEMP_DRIFT_C: f64 = 0.2;
/// Period of the ambient temperature drift, seconds.
pub const TEMP_PERIOD_S: f64 = 600.0;

/// Flow-path rates and tank capacity for one plant instance. The defaults
/// match the constants above; tests occasionally override single rates.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ProcessParams {
    pub total_volume: f64,
    pub pump_rate_lpm: f64,
    pub valve_rate_lpm: f64,
    pub return_rate_lpm: f64,
}

impl Default for ProcessParams {
    fn default() -> Self {
        Self {
            total_volume: TOTAL_VOLUME,
            pump_rate_lpm: PUMP_RATE_LPM,
            valve_rate_lpm: VALVE_RATE_LPM,
            return_rate_lpm: RETURN_RATE_LPM,
        }
    }
}

/// Physical truth of the plant at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProcessState {
    /// Simulation time, seconds.
    pub t: f64,
    /// Water in container 101, liters.
    pub vol_101: f64,
    /// Water in container 102, liters.
    pub vol_102: f64,
    /// Pump M101 actuation.
    pub pump_on: bool,
    /// Ball valve M102 actuation.
    pub valve_open: bool,
    /// True while the pump is commanded on but container 101 ran empty
    /// during the pump stroke. Implies `pump_on`.
    pub pump_dry: bool,
}

impl ProcessState {
    pub fn initial() -> Self {
        Self::with_volumes(INITIAL_VOL_101, INITIAL_VOL_102)
    }

    pub fn with_volumes(vol_101: f64, vol_102: f64) -> Self {
        Self {
            t: 0.0,
            vol_101,
            vol_102,
            pump_on: false,
            valve_open: false,
            pump_dry: false,
        }
    }
}

/// Derived sensor values for one scan. All of it is a pure function of the
/// process state; nothing here has memory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorReadings {
    /// Ultrasonic level of container 102, liters.
    pub b101_level: f64,
    /// Vane-sensor flow 101 → 102, liters per minute. Reads the nominal pump
    /// rate while the pump moves water and zero otherwise — the vane does not
    /// register the dry-running trickle.
    pub b102_flow: f64,
    /// Hydrostatic pressure proxy, millibar.
    pub b103_pressure: f64,
    /// Water temperature, degrees Celsius.
    pub b104_temp: f64,
    /// Low float switch on container 101: reservoir nearly empty.
    pub s111: bool,
    /// High float switch on container 101: reservoir nearly full.
    pub s112: bool,
    /// Capacitive switch on container 102: lower threshold exceeded.
    pub b113: bool,
    /// Capacitive switch on container 102: upper threshold exceeded.
    pub b114: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum StepError {
    #[error("timestep must be positive, got {0}")]
    NonPositiveDt(f64),
    #[error("non-finite volume in state: vol_101={0}, vol_102={1}")]
    NonFiniteVolume(f64, f64),
}

/// Advances the plant by `dt` seconds with explicit Euler transfers.
///
/// Transfers are applied sequentially — pump, then valve, then passive
/// return — each clamped to what its source container still holds. The order
/// only matters in clamp situations; without clamps the update is linear and
/// subdividing `dt` gives identical volumes.
pub fn step(state: &ProcessState, params: &ProcessParams, dt: f64) -> Result<ProcessState, StepError> {
    if dt <= 0.0 {
        return Err(StepError::NonPositiveDt(dt));
    }
    if !state.vol_101.is_finite() || !state.vol_102.is_finite() {
        return Err(StepError::NonFiniteVolume(state.vol_101, state.vol_102));
    }

    let mut v101 = state.vol_101;
    let mut v102 = state.vol_102;
    let mut pump_dry = false;

    if state.pump_on {
        let moved = (params.pump_rate_lpm / 60.0 * dt).min(v101);
        v101 -= moved;
        v102 += moved;
        // The stroke emptied the reservoir: the pump is sucking air.
        pump_dry = v101 == 0.0;
    }
    if state.valve_open {
        let moved = (params.valve_rate_lpm / 60.0 * dt).min(v102);
        v102 -= moved;
        v101 += moved;
    }
    let returned = (params.return_rate_lpm / 60.0 * dt).min(v102);
    v102 -= returned;
    v101 += returned;

    Ok(ProcessState {
        t: state.t + dt,
        vol_101: v101,
        vol_102: v102,
        pump_on: state.pump_on,
        valve_open: state.valve_open,
        pump_dry,
    })
}

/// Ambient temperature model: a slow sinusoidal drift around 20 °C.
pub fn ambient_temp(t: f64) -> f64 {
    TEMP_BASE_C + TEMP_DRIFT_C * (2.0 * std::f64::consts::PI * t / TEMP_PERIOD_S).sin()
}

/// Derives all sensor readings from the state. `low_threshold` and
/// `high_threshold` are the capacitive switch set points on container 102
/// (they track the PLC control thresholds). `temp_c` is the current water
/// temperature; pass [`ambient_temp`] unless a disturbance model applies.
pub fn read_sensors(
    state: &ProcessState,
    params: &ProcessParams,
    low_threshold: f64,
    high_threshold: f64,
    temp_c: f64,
) -> SensorReadings {
    let pumping = state.pump_on && !state.pump_dry && state.vol_101 > 0.0;
    let level = state.vol_102;
    SensorReadings {
        b101_level: level,
        b102_flow: if pumping { params.pump_rate_lpm } else { 0.0 },
        b103_pressure: PRESSURE_GAIN * level,
        b104_temp: temp_c,
        s111: state.vol_101 <= S111_LEVEL,
        s112: state.vol_101 >= S112_LEVEL,
        b113: level >= low_threshold,
        b114: level >= high_threshold,
    }
}
