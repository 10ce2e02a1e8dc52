//! Synthetic reference model of a district energy system.
//!
//! Every feasible design is simulated over a synthetic 8760-hour year:
//!
//! * each building type's heating, cooling and electric demand follows
//!   degree-hours weighted by its own daily occupancy schedule, scaled by the
//!   catalog's annual densities, so districts mixing types see flatter
//!   aggregate loads;
//! * the hot-water supply drops by the summer reset on summer days and the
//!   chilled-water supply rises by the winter reset on winter days;
//! * each hour the CHP engine is dispatched at the cheapest of its discrete
//!   part-load levels (or switched off) against a time-of-use tariff, with an
//!   auxiliary boiler covering the heat it leaves unmet;
//! * CHP heat recovery degrades with supply temperature, chiller COP improves
//!   with warmer chilled water and worsens with outdoor temperature, and
//!   pumping power grows as the supply/return split narrows.
//!
//! Objectives per m² of building floor area over the analysis horizon:
//!
//! * GHG = annual fuel energy × emission factor × horizon / area;
//! * LCC = (plant capital + pipe network cost + operating cost − export
//!   revenue) / area, which goes negative when export revenue dominates;
//! * WalkScore = 15 × (distinct building types − 1) / 3.
//!
//! Distribution heat losses are priced once, inside the pipe network cost;
//! the dispatch serves building loads only.

use std::f64::consts::PI;

use serde::Serialize;

use super::pipes::{self, PipeNetwork, PipeNetworkError};
use super::{validate, walkscore, Catalog, DecisionVector, Feasibility, GridGeometry, ObjectiveTriple, Violation};

const HOURS: usize = 8760;
const PART_LOAD_STEP: f64 = 0.1;
const HEATING_SETBACK: f64 = 0.4;

/// Result of evaluating a design.
#[derive(Clone, Debug, PartialEq)]
pub enum Evaluation {
    Feasible(ObjectiveTriple),
    Infeasible(Vec<Violation>),
}

impl Evaluation {
    pub fn objectives(&self) -> Option<ObjectiveTriple> {
        match self {
            Evaluation::Feasible(o) => Some(*o),
            Evaluation::Infeasible(_) => None,
        }
    }

    pub fn violation_count(&self) -> usize {
        match self {
            Evaluation::Feasible(_) => 0,
            Evaluation::Infeasible(v) => v.len(),
        }
    }
}

/// Cost and energy breakdown behind one [`ObjectiveTriple`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DesignBreakdown {
    pub floor_area_m2: f64,
    pub plant_capital: f64,
    pub pipe_network: PipeNetwork,
    /// Annual operating cost: fuel, CHP maintenance and grid imports.
    pub annual_operating_cost: f64,
    pub annual_export_revenue: f64,
    pub annual_chp_fuel_kwh: f64,
    pub annual_boiler_fuel_kwh: f64,
    pub annual_import_kwh: f64,
    pub annual_export_kwh: f64,
    pub objectives: ObjectiveTriple,
}

#[derive(Clone, Copy, Debug)]
struct Hour {
    outdoor_c: f64,
    peak: bool,
    summer: bool,
    winter: bool,
}

/// Fraction of a building type's annual demand falling in each hour.
#[derive(Clone, Debug)]
struct LoadShares {
    heat: Vec<f64>,
    cool: Vec<f64>,
    elec: Vec<f64>,
}

/// Immutable model: catalog, geometry and the precomputed hourly climate and
/// per-type load shapes.
#[derive(Clone, Debug)]
pub struct ReferenceModel {
    catalog: Catalog,
    geometry: GridGeometry,
    hours: Vec<Hour>,
    shares: Vec<LoadShares>,
    summer_fraction: f64,
}

impl ReferenceModel {
    pub fn new(catalog: Catalog) -> Self {
        let (hours, shares) = climate_profile(&catalog);
        let summer_fraction = hours.iter().filter(|h| h.summer).count() as f64 / HOURS as f64;
        Self { catalog, geometry: GridGeometry::standard(), hours, shares, summer_fraction }
    }

    /// Model over the bundled catalog.
    pub fn reference() -> Self {
        Self::new(Catalog::reference())
    }

    pub fn catalog(&self) -> &Catalog {
        &self.catalog
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    /// Fraction of the year on which the hot-water summer reset applies.
    pub fn summer_fraction(&self) -> f64 {
        self.summer_fraction
    }

    /// Annual mean hot-water supply temperature of a design, °C.
    pub fn mean_supply_temp(&self, d: &DecisionVector) -> f64 {
        d.hot_water_temp as f64 - d.hot_water_summer_reset as f64 * self.summer_fraction
    }

    /// Cost-minimal pipe assignment for a feasible design, valued at its
    /// annual mean supply temperature.
    pub fn solve_pipe_network(&self, d: &DecisionVector) -> Result<PipeNetwork, PipeNetworkError> {
        pipes::solve(d, &self.geometry, &self.catalog, self.mean_supply_temp(d))
    }

    pub fn evaluate(&self, d: &DecisionVector) -> Evaluation {
        match self.evaluate_detailed(d) {
            Ok(b) => Evaluation::Feasible(b.objectives),
            Err(v) => Evaluation::Infeasible(v),
        }
    }

    pub fn evaluate_detailed(&self, d: &DecisionVector) -> Result<DesignBreakdown, Vec<Violation>> {
        if let Feasibility::Infeasible(v) = validate(d) {
            return Err(v);
        }
        let c = &self.catalog;
        let site = &c.site;
        let prices = &c.prices;
        let area_each = site.building_floor_area_m2;
        let area = area_each * d.building_count() as f64;

        // annual kWh per building type present
        let mut annual = vec![[0.0; 3]; c.building.len()];
        for (_, t) in d.buildings() {
            let b = &c.building[(t - 1) as usize];
            let a = &mut annual[(t - 1) as usize];
            a[0] += b.heating * area_each;
            a[1] += b.cooling * area_each;
            a[2] += b.electric * area_each;
        }
        let present: Vec<(&LoadShares, [f64; 3])> =
            annual.iter().zip(&self.shares).filter(|(a, _)| a[0] > 0.0).map(|(a, s)| (s, *a)).collect();

        let network = self.solve_pipe_network(d).expect("design validated above");
        let chp = &c.chp[(d.chp_type - 1) as usize];
        let chiller = &c.chiller[(d.chiller_type - 1) as usize];

        // part-load levels; the first entry is "off"
        let mut levels = vec![0.0];
        let mut plr = chp.min_part_load;
        while plr < 1.0 - 1e-9 {
            levels.push(plr);
            plr += PART_LOAD_STEP;
        }
        levels.push(1.0);
        let elec_out: Vec<f64> = levels.iter().map(|&l| l * chp.capacity_kw).collect();
        let fuel_in: Vec<f64> = levels
            .iter()
            .zip(&elec_out)
            .map(|(&l, &p)| if l > 0.0 { p / (chp.electrical_efficiency * (0.8 + 0.2 * l)) } else { 0.0 })
            .collect();
        let fixed_cost: Vec<f64> =
            fuel_in.iter().zip(&elec_out).map(|(&f, &p)| f * chp.fuel_price + p * prices.chp_maintenance).collect();
        let heat_out = |supply_c: f64| -> Vec<f64> {
            let recovery = chp.thermal_efficiency * (1.0 - site.chp_temperature_derate * (supply_c - 60.0));
            levels.iter().zip(&fuel_in).map(|(&l, &f)| f * recovery * (1.1 - 0.1 * l)).collect()
        };
        let winter_hot = d.hot_water_temp as f64;
        let summer_hot = winter_hot - d.hot_water_summer_reset as f64;
        let heat_winter = heat_out(winter_hot);
        let heat_summer = heat_out(summer_hot);
        let boiler_heat_cost = prices.boiler_fuel / site.boiler_efficiency;

        let mut chp_fuel = 0.0;
        let mut boiler_fuel = 0.0;
        let mut imported = 0.0;
        let mut exported = 0.0;
        let mut operating = 0.0;
        let mut revenue = 0.0;
        let mut peak_heat: f64 = 0.0;
        let mut peak_cool: f64 = 0.0;

        for (i, h) in self.hours.iter().enumerate() {
            let hot_c = if h.summer { summer_hot } else { winter_hot };
            let cold_c = d.cold_water_temp as f64 + if h.winter { d.cold_water_winter_reset as f64 } else { 0.0 };
            let (mut heat_h, mut cool_h, mut elec_h) = (0.0, 0.0, 0.0);
            for (s, a) in &present {
                heat_h += a[0] * s.heat[i];
                cool_h += a[1] * s.cool[i];
                elec_h += a[2] * s.elec[i];
            }
            peak_heat = peak_heat.max(heat_h);
            peak_cool = peak_cool.max(cool_h);

            let pump = site.pump_coefficient
                * (heat_h / (hot_c - site.hot_return_temp_c) + cool_h / (site.cold_return_temp_c - cold_c));
            let cop = (chiller.cop
                * (1.0 + site.chiller_supply_gain * (cold_c - 5.0))
                * (1.0 - site.chiller_outdoor_penalty * (h.outdoor_c - 25.0).max(0.0)))
            .max(1.0);
            let demand = elec_h + cool_h / cop + pump;
            let (import_price, export_price) = if h.peak {
                (prices.import_peak, prices.export_peak)
            } else {
                (prices.import_offpeak, prices.export_offpeak)
            };
            let recovered = if h.summer { &heat_summer } else { &heat_winter };

            let mut best = (f64::INFINITY, 0usize, 0.0);
            for l in 0..levels.len() {
                let unmet = (heat_h - recovered[l]).max(0.0);
                let net = elec_out[l] - demand;
                let grid = if net >= 0.0 { -net * export_price } else { -net * import_price };
                let cost = fixed_cost[l] + unmet * boiler_heat_cost + grid;
                if cost < best.0 {
                    best = (cost, l, unmet);
                }
            }
            let (_, l, unmet) = best;
            let net = elec_out[l] - demand;
            chp_fuel += fuel_in[l];
            boiler_fuel += unmet / site.boiler_efficiency;
            operating += fixed_cost[l] + unmet * boiler_heat_cost;
            if net >= 0.0 {
                exported += net;
                revenue += net * export_price;
            } else {
                imported -= net;
                operating -= net * import_price;
            }
        }

        let horizon = site.horizon_years;
        let ghg =
            (chp_fuel * chp.emission_factor + boiler_fuel * site.boiler_emission_factor) * horizon / area / 1000.0;
        let plant_capital = site.plant_fixed_cost
            + chp.capacity_kw * chp.unit_cost
            + chiller.unit_cost * peak_cool
            + site.boiler_unit_cost * peak_heat;
        let lcc = (plant_capital + network.total_cost() + horizon * (operating - revenue)) / area;
        let objectives = ObjectiveTriple::new(lcc, ghg, walkscore(d));

        Ok(DesignBreakdown {
            floor_area_m2: area,
            plant_capital,
            pipe_network: network,
            annual_operating_cost: operating,
            annual_export_revenue: revenue,
            annual_chp_fuel_kwh: chp_fuel,
            annual_boiler_fuel_kwh: boiler_fuel,
            annual_import_kwh: imported,
            annual_export_kwh: exported,
            objectives,
        })
    }
}

fn climate_profile(c: &Catalog) -> (Vec<Hour>, Vec<LoadShares>) {
    let cl = &c.climate;
    let mut hours = Vec::with_capacity(HOURS);
    let mut hdh = Vec::with_capacity(HOURS);
    let mut cdh = Vec::with_capacity(HOURS);
    for h in 0..HOURS {
        let day = (h / 24) as f64;
        let hod = (h % 24) as u32;
        let daily_mean =
            cl.mean_temp_c - cl.annual_amplitude_c * (2.0 * PI * (day - cl.coldest_day as f64) / 365.0).cos();
        // coldest at 03:00, warmest at 15:00
        let outdoor = daily_mean - cl.diurnal_amplitude_c * (2.0 * PI * (hod as f64 - 3.0) / 24.0).cos();
        hdh.push((cl.heating_balance_c - outdoor).max(0.0));
        cdh.push((outdoor - cl.cooling_balance_c).max(0.0));
        hours.push(Hour {
            outdoor_c: outdoor,
            peak: (c.prices.peak_start_hour..c.prices.peak_end_hour).contains(&hod),
            summer: daily_mean > cl.summer_threshold_c,
            winter: daily_mean < cl.winter_threshold_c,
        });
    }
    let normalize = |v: Vec<f64>| -> Vec<f64> {
        let total: f64 = v.iter().sum();
        v.into_iter().map(|x| x / total).collect()
    };
    let shares = c
        .building
        .iter()
        .map(|b| {
            let occ = |h: usize| b.occupancy[h % 24];
            let flat = normalize((0..HOURS).map(occ).collect());
            // setback: unoccupied hours keep part of their heating load
            let heat_dh =
                normalize((0..HOURS).map(|h| hdh[h] * (HEATING_SETBACK + (1.0 - HEATING_SETBACK) * occ(h))).collect());
            let cool_dh = normalize((0..HOURS).map(|h| cdh[h] * occ(h)).collect());
            let (hw, cb) = (cl.hot_water_base_fraction, cl.cooling_base_fraction);
            LoadShares {
                heat: (0..HOURS).map(|h| hw * flat[h] + (1.0 - hw) * heat_dh[h]).collect(),
                cool: (0..HOURS).map(|h| cb * flat[h] + (1.0 - cb) * cool_dh[h]).collect(),
                elec: flat,
            }
        })
        .collect();
    (hours, shares)
}
