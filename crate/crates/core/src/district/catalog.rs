use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The catalog shipped with the crate.
pub const DEFAULT_CATALOG: &str = include_str!("../../data/catalog.toml");

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("reading catalog {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("parsing catalog: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("catalog must list {expected} {kind} entries, found {found}")]
    Count { kind: &'static str, expected: usize, found: usize },
    #[error("catalog value {name} must be positive, got {value}")]
    NonPositive { name: String, value: f64 },
    #[error("catalog value {name} = {value} is out of range")]
    OutOfRange { name: String, value: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SiteParams {
    pub building_floor_area_m2: f64,
    pub ground_temp_c: f64,
    pub hot_return_temp_c: f64,
    pub cold_return_temp_c: f64,
    pub horizon_years: f64,
    pub plant_fixed_cost: f64,
    pub boiler_efficiency: f64,
    pub boiler_unit_cost: f64,
    pub boiler_emission_factor: f64,
    pub pump_coefficient: f64,
    pub chp_temperature_derate: f64,
    pub chiller_supply_gain: f64,
    pub chiller_outdoor_penalty: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Prices {
    pub boiler_fuel: f64,
    pub import_peak: f64,
    pub import_offpeak: f64,
    pub export_peak: f64,
    pub export_offpeak: f64,
    pub chp_maintenance: f64,
    pub peak_start_hour: u32,
    pub peak_end_hour: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClimateParams {
    pub mean_temp_c: f64,
    pub annual_amplitude_c: f64,
    pub diurnal_amplitude_c: f64,
    pub coldest_day: u32,
    pub heating_balance_c: f64,
    pub cooling_balance_c: f64,
    pub summer_threshold_c: f64,
    pub winter_threshold_c: f64,
    pub hot_water_base_fraction: f64,
    pub cooling_base_fraction: f64,
}

/// Annual demand densities of one building type, kWh/(m²·yr), and its
/// daily occupancy schedule.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildingType {
    pub name: String,
    pub heating: f64,
    pub cooling: f64,
    pub electric: f64,
    /// Relative activity for each hour of the day, starting at midnight.
    pub occupancy: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChpType {
    pub name: String,
    pub electrical_efficiency: f64,
    pub thermal_efficiency: f64,
    /// Rated electrical output, kW.
    pub capacity_kw: f64,
    /// Capital cost per kW of electrical capacity.
    pub unit_cost: f64,
    /// kg CO2-eq per kWh of fuel.
    pub emission_factor: f64,
    /// $ per kWh of fuel.
    pub fuel_price: f64,
    pub min_part_load: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChillerType {
    pub name: String,
    pub cop: f64,
    /// Capital cost per kW of cooling capacity.
    pub unit_cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipeType {
    pub diameter_mm: u32,
    /// $ per meter of trench.
    pub unit_cost: f64,
    /// W per meter per K of supply-to-ground difference.
    pub loss_coefficient: f64,
}

/// Fixed technology catalog plus site, tariff and climate constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Catalog {
    pub site: SiteParams,
    pub prices: Prices,
    pub climate: ClimateParams,
    pub building: Vec<BuildingType>,
    pub chp: Vec<ChpType>,
    pub chiller: Vec<ChillerType>,
    pub pipe: Vec<PipeType>,
}

impl Catalog {
    pub fn from_toml_str(text: &str) -> Result<Self, CatalogError> {
        let catalog: Catalog = toml::from_str(text)?;
        catalog.check()?;
        Ok(catalog)
    }

    pub fn from_path(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CatalogError::Io { path: path.display().to_string(), source })?;
        Self::from_toml_str(&text)
    }

    /// The catalog bundled with the crate.
    pub fn reference() -> Self {
        Self::from_toml_str(DEFAULT_CATALOG).expect("bundled catalog is valid")
    }

    fn check(&self) -> Result<(), CatalogError> {
        count("building", 4, self.building.len())?;
        count("chp", 6, self.chp.len())?;
        count("chiller", 3, self.chiller.len())?;
        count("pipe", 5, self.pipe.len())?;

        let s = &self.site;
        for (name, v) in [
            ("site.building_floor_area_m2", s.building_floor_area_m2),
            ("site.horizon_years", s.horizon_years),
            ("site.plant_fixed_cost", s.plant_fixed_cost),
            ("site.boiler_efficiency", s.boiler_efficiency),
            ("site.boiler_unit_cost", s.boiler_unit_cost),
            ("site.boiler_emission_factor", s.boiler_emission_factor),
            ("site.pump_coefficient", s.pump_coefficient),
            ("prices.boiler_fuel", self.prices.boiler_fuel),
            ("prices.import_peak", self.prices.import_peak),
            ("prices.import_offpeak", self.prices.import_offpeak),
            ("prices.export_peak", self.prices.export_peak),
            ("prices.export_offpeak", self.prices.export_offpeak),
        ] {
            positive(name, v)?;
        }
        // the hottest return must stay below the coolest hot supply (50 − 10 °C)
        if s.hot_return_temp_c >= 40.0 {
            return Err(CatalogError::OutOfRange { name: "site.hot_return_temp_c".into(), value: s.hot_return_temp_c });
        }
        // the warmest chilled supply is 8 + 3 °C
        if s.cold_return_temp_c <= 11.0 {
            return Err(CatalogError::OutOfRange {
                name: "site.cold_return_temp_c".into(),
                value: s.cold_return_temp_c,
            });
        }
        if self.prices.peak_start_hour >= self.prices.peak_end_hour || self.prices.peak_end_hour > 24 {
            return Err(CatalogError::OutOfRange {
                name: "prices.peak_end_hour".into(),
                value: self.prices.peak_end_hour as f64,
            });
        }
        for b in &self.building {
            positive(&format!("building.{}.heating", b.name), b.heating)?;
            positive(&format!("building.{}.cooling", b.name), b.cooling)?;
            positive(&format!("building.{}.electric", b.name), b.electric)?;
            if b.occupancy.len() != 24 {
                return Err(CatalogError::Count { kind: "occupancy hour", expected: 24, found: b.occupancy.len() });
            }
            for (h, &v) in b.occupancy.iter().enumerate() {
                positive(&format!("building.{}.occupancy[{h}]", b.name), v)?;
            }
        }
        for c in &self.chp {
            for (field, v) in [
                ("electrical_efficiency", c.electrical_efficiency),
                ("thermal_efficiency", c.thermal_efficiency),
                ("capacity_kw", c.capacity_kw),
                ("unit_cost", c.unit_cost),
                ("emission_factor", c.emission_factor),
                ("fuel_price", c.fuel_price),
                ("min_part_load", c.min_part_load),
            ] {
                positive(&format!("chp.{}.{field}", c.name), v)?;
            }
            if c.electrical_efficiency + c.thermal_efficiency >= 1.0 || c.min_part_load > 1.0 {
                return Err(CatalogError::OutOfRange {
                    name: format!("chp.{}", c.name),
                    value: c.electrical_efficiency + c.thermal_efficiency,
                });
            }
        }
        for c in &self.chiller {
            positive(&format!("chiller.{}.cop", c.name), c.cop)?;
            positive(&format!("chiller.{}.unit_cost", c.name), c.unit_cost)?;
        }
        for p in &self.pipe {
            positive(&format!("pipe.{}.unit_cost", p.diameter_mm), p.unit_cost)?;
            positive(&format!("pipe.{}.loss_coefficient", p.diameter_mm), p.loss_coefficient)?;
            positive(&format!("pipe.{}.diameter_mm", p.diameter_mm), p.diameter_mm as f64)?;
        }
        Ok(())
    }

    /// Dollars charged per watt of continuous pipe heat loss over the horizon,
    /// valued at the boiler's cost of heat.
    pub fn heat_loss_price_factor(&self) -> f64 {
        let heat_price = self.prices.boiler_fuel / self.site.boiler_efficiency;
        8760.0 * self.site.horizon_years * heat_price / 1000.0
    }
}

fn count(kind: &'static str, expected: usize, found: usize) -> Result<(), CatalogError> {
    if expected == found {
        Ok(())
    } else {
        Err(CatalogError::Count { kind, expected, found })
    }
}

fn positive(name: &str, value: f64) -> Result<(), CatalogError> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(CatalogError::NonPositive { name: name.to_string(), value })
    }
}
