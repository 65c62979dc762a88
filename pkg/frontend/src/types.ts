// Shapes of the JSON bodies exchanged with the dietwise service.
// These mirror docs/api.md in the backend repo; the client renders the
// values it receives and never recomputes any of them.

export interface DetectionBox {
  x: number;
  y: number;
  w: number;
  h: number;
  label: string;
  confidence: number;
}

export interface Detections {
  image_ref: string;
  detector_id: string;
  latency_ms: number;
  boxes: DetectionBox[];
}

export interface Reason {
  code: string;
  text: string;
}

export interface Alternative {
  food_id: string;
  food_name: string;
  glycemic_index: number;
}

export type Verdict = "compatible" | "caution" | "incompatible";

export interface Recommendation {
  food_id: string;
  food_name: string;
  verdict: Verdict;
  reasons: Reason[];
  glycemic_class: string;
  glycemic_index: number;
  nutrients: Record<string, unknown>;
  alternatives: Alternative[];
}

export interface ScanResponse {
  detections: Detections;
  recommendations: Recommendation[];
  unrecognized_labels: string[];
}

export interface Profile {
  user_id: string;
  display_name: string;
  conditions: string[];
  restrictions: string[];
  goals: string[];
  is_admin: boolean;
}

export interface LikertItemSummary {
  count: number;
  mean: number;
  histogram: Record<string, number>;
  satisfied_share: number;
}

export interface NpsSummary {
  promoters: number;
  passives: number;
  detractors: number;
  score: number;
}

export interface SurveySummary {
  likert: Record<string, LikertItemSummary>;
  nps: NpsSummary | null;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  retriable: boolean;
}

/** One selectable demo image bundled with the service. */
export interface FixtureImage {
  id: number;
  title: string;
  width: number;
  height: number;
}

// The service's bundled dataset; dimensions are needed to scale overlay
// boxes, which arrive in the source image's coordinate space.
export const FIXTURE_IMAGES: FixtureImage[] = [
  { id: 1, title: "pizza and carrot plate", width: 512, height: 512 },
  { id: 2, title: "banana next to pizza", width: 640, height: 480 },
  { id: 3, title: "street scene (no food)", width: 512, height: 384 },
];

// Uploads are stretched server-side to this square before detection, so
// remote-detector boxes always come back in this coordinate space.
export const UPLOAD_SPACE = { width: 512, height: 512 };
