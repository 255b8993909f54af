// Wire types for the gateway /v1 API. The console never recomputes any of
// these numbers; it renders them verbatim.

export interface LeverValues {
  congestion_price: number;
  ev_incentive_usd: number;
  transit_headway_multiplier: number;
  parking_search_minutes: number;
  charger_ports_added: number;
}

export type LeverBounds = Record<string, { min: number; max: number; step: number }>;

export interface LeverSnapshotAck {
  snapshot_id: number;
  levers: LeverValues;
  requested_tick: number | null;
  applied_tick: number | null;
}

export interface HubStats {
  hub_id: string;
  zone: string;
  spaces: number;
  transfers: number;
  parked_in: number;
  parked_out: number;
  occupancy_end: number;
  peak_occupancy: number;
  parking_denied: number;
  charger_ports: number;
  charge_sessions_started: number;
  charge_sessions_completed: number;
  charge_sessions_in_progress: number;
  charge_wait_mean_min: number;
  charge_wait_max_min: number;
  charger_utilization: number;
}

export interface MilestoneGauge {
  goals: Record<string, number>;
  reference_daily_mtco2e: number | null;
  achieved_daily_reduction?: number;
}

export interface SnapshotFrame {
  run_id: string;
  tick: number;
  state: string;
  final?: boolean;
  error?: string;
  trips_started: number;
  trips_completed: number;
  mode_counts: Record<string, number>;
  mode_shares: Record<string, number>;
  vehicle_vmt: number;
  bus_vmt: number;
  total_mtco2e: number;
  zone_mtco2e: Record<string, number>;
  hubs: HubStats[];
  lever_snapshot_id: number;
  levers: LeverValues;
  milestone_gauge: MilestoneGauge;
}

export interface RunHandle {
  run_id: string;
  state: string;
  seed: number;
  world: string;
  cadence: number;
  n_agents: number;
  error: string | null;
}

export interface ComplianceRow {
  kind: string;
  milestone_year: number;
  required: number;
  achieved: number;
  pass: boolean;
  gap: number;
}

export interface ScenarioSeries {
  name: string;
  baseline_total: number;
  years: number[];
  emissions_mtco2e: number[];
  vmt: number[];
  reduction: number[];
  compliance: ComplianceRow[];
}

export interface EvaluateResponse {
  baseline_total: number;
  results: ScenarioSeries[];
}

export interface EquityScoreRow {
  tract_id: string;
  internal: number;
  external: number;
  index: number;
}

export interface GeoFeature {
  type: "Feature";
  geometry: { type: string; coordinates: number[][][] } | null;
  properties: Record<string, unknown>;
}

export interface FeatureCollection {
  type: "FeatureCollection";
  features: GeoFeature[];
}
