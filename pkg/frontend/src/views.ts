import { buildOverlays, Size } from "./overlay.js";
import type {
  Recommendation,
  ScanResponse,
  SurveySummary,
  Profile,
} from "./types.js";

// The survey questionnaire: seven 1-5 items plus the 0-5 recommendation
// item. Ids must match what the service aggregates.
export const LIKERT_ITEMS: ReadonlyArray<{ id: string; label: string }> = [
  { id: "user-friendliness", label: "The app is easy to use" },
  { id: "recommendation-accuracy", label: "Recommendations are accurate" },
  { id: "personalized-guidance", label: "Guidance feels personalized" },
  { id: "privacy-trust", label: "I trust how my data is handled" },
  { id: "contentment", label: "Overall I am content with the app" },
  { id: "recommend-likelihood", label: "I would keep using the app" },
  { id: "image-recognition-speed", label: "Photo recognition is fast" },
];

export const NPS_ITEM = {
  id: "nps-recommend",
  label: "How likely are you to recommend the app? (0-5)",
};

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

// ---------------------------------------------------------------------------
// results screen

/**
 * Render one scan response: the image stage with overlay boxes, then a
 * chat-styled panel with one assistant card per recommendation.
 *
 * Every number shown (confidence, GI, nutrients) is the server's value
 * rendered verbatim; the client computes nothing.
 */
export function renderResults(
  doc: Document,
  scan: ScanResponse,
  natural: Size,
  display: Size,
  imageUrl?: string,
): HTMLElement {
  const root = el(doc, "section", "results");

  const stage = el(doc, "div", "image-stage");
  stage.style.position = "relative";
  stage.style.width = `${display.width}px`;
  stage.style.height = `${display.height}px`;
  if (imageUrl) {
    const img = el(doc, "img", "scan-image");
    img.src = imageUrl;
    img.style.width = "100%";
    img.style.height = "100%";
    stage.appendChild(img);
  }
  for (const box of buildOverlays(doc, scan.detections.boxes, natural, display)) {
    stage.appendChild(box);
  }
  root.appendChild(stage);

  if (scan.detections.boxes.length === 0) {
    root.appendChild(
      el(doc, "p", "empty-state", "No matching items found in this photo."),
    );
  }

  const chat = el(doc, "div", "chat-panel");
  for (const rec of scan.recommendations) {
    chat.appendChild(renderRecommendationCard(doc, rec));
  }
  if (scan.unrecognized_labels.length > 0) {
    const note = el(doc, "div", "chat-bubble unrecognized");
    note.appendChild(el(doc, "p", undefined, "I could not find these in the catalog:"));
    const list = el(doc, "ul", "unrecognized-list");
    for (const label of scan.unrecognized_labels) {
      list.appendChild(el(doc, "li", undefined, label));
    }
    note.appendChild(list);
    chat.appendChild(note);
  }
  root.appendChild(chat);
  return root;
}

export function renderRecommendationCard(
  doc: Document,
  rec: Recommendation,
): HTMLElement {
  const card = el(doc, "article", "chat-bubble recommendation");
  const head = el(doc, "header", "rec-head");
  head.appendChild(el(doc, "h3", "rec-name", rec.food_name));
  head.appendChild(el(doc, "span", `verdict-badge verdict-${rec.verdict}`, rec.verdict));
  head.appendChild(
    el(doc, "span", "glycemic-class", `${rec.glycemic_class} GI (${rec.glycemic_index})`),
  );
  card.appendChild(head);

  for (const reason of rec.reasons) {
    card.appendChild(el(doc, "p", "rec-reason", reason.text));
  }

  card.appendChild(renderNutrientTable(doc, rec.nutrients));

  if (rec.alternatives.length > 0) {
    card.appendChild(el(doc, "h4", undefined, "Gentler swaps"));
    const list = el(doc, "ul", "alternatives");
    for (const alt of rec.alternatives) {
      list.appendChild(
        el(doc, "li", "alternative", `${alt.food_name} (GI ${alt.glycemic_index})`),
      );
    }
    card.appendChild(list);
  }
  return card;
}

function renderNutrientTable(doc: Document, nutrients: Record<string, unknown>): HTMLElement {
  const table = el(doc, "table", "nutrients");
  const body = el(doc, "tbody");
  for (const [key, value] of Object.entries(nutrients)) {
    if (key === "micronutrients") continue;
    const row = el(doc, "tr");
    row.appendChild(el(doc, "th", undefined, key.replace(/_/g, " ")));
    row.appendChild(el(doc, "td", undefined, String(value)));
    body.appendChild(row);
  }
  table.appendChild(body);
  return table;
}

// ---------------------------------------------------------------------------
// survey screen

/** A survey form with a selector per item; submit stays disabled until
 * every item is answered (mirrors the server's range rules client-side). */
export function renderSurveyForm(
  doc: Document,
  onSubmit: (responses: Array<{ item_id: string; rating: number }>) => void,
): HTMLElement {
  const form = el(doc, "form", "survey-form");
  const selects: HTMLSelectElement[] = [];

  const addItem = (id: string, label: string, min: number, max: number) => {
    const row = el(doc, "label", "survey-row");
    row.appendChild(el(doc, "span", undefined, label));
    const select = el(doc, "select");
    select.name = id;
    const blank = el(doc, "option", undefined, "—");
    blank.value = "";
    select.appendChild(blank);
    for (let v = min; v <= max; v += 1) {
      const opt = el(doc, "option", undefined, String(v));
      opt.value = String(v);
      select.appendChild(opt);
    }
    row.appendChild(select);
    form.appendChild(row);
    selects.push(select);
  };

  for (const item of LIKERT_ITEMS) addItem(item.id, item.label, 1, 5);
  addItem(NPS_ITEM.id, NPS_ITEM.label, 0, 5);

  const submit = el(doc, "button", "survey-submit", "Send feedback");
  submit.type = "submit";
  submit.disabled = true;
  form.appendChild(submit);

  const refresh = () => {
    submit.disabled = selects.some((s) => s.value === "");
  };
  for (const select of selects) select.addEventListener("change", refresh);

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    if (submit.disabled) return;
    onSubmit(
      selects.map((s) => ({ item_id: s.name, rating: Number(s.value) })),
    );
  });
  return form;
}

// ---------------------------------------------------------------------------
// admin dashboard

/** Survey summary as delivered by the service: per-item means with
 * histogram bars, and the NPS block. All figures are server values. */
export function renderAdminDashboard(doc: Document, summary: SurveySummary): HTMLElement {
  const root = el(doc, "section", "admin-dashboard");
  root.appendChild(el(doc, "h2", undefined, "Survey summary"));

  const table = el(doc, "table", "likert-summary");
  const head = el(doc, "tr");
  for (const col of ["item", "responses", "mean", "satisfied"]) {
    head.appendChild(el(doc, "th", undefined, col));
  }
  table.appendChild(head);
  for (const [itemId, item] of Object.entries(summary.likert)) {
    const row = el(doc, "tr", "likert-row");
    row.dataset.item = itemId;
    row.appendChild(el(doc, "td", "item-id", itemId));
    row.appendChild(el(doc, "td", "item-count", String(item.count)));
    row.appendChild(el(doc, "td", "item-mean", item.mean.toFixed(2)));
    row.appendChild(
      el(doc, "td", "item-satisfied", `${Math.round(item.satisfied_share * 100)}%`),
    );
    table.appendChild(row);
  }
  root.appendChild(table);

  if (summary.nps) {
    const block = el(doc, "div", "nps-block");
    block.appendChild(el(doc, "h3", undefined, "Net promoter score"));
    block.appendChild(el(doc, "p", "nps-score", summary.nps.score.toFixed(1)));
    block.appendChild(
      el(
        doc,
        "p",
        "nps-parts",
        `${summary.nps.promoters} promoters / ${summary.nps.passives} passives / ` +
          `${summary.nps.detractors} detractors`,
      ),
    );
    root.appendChild(block);
  } else {
    root.appendChild(el(doc, "p", "nps-empty", "No recommendation ratings yet."));
  }
  return root;
}

// ---------------------------------------------------------------------------
// profile screen

export function renderProfileSummary(doc: Document, profile: Profile): HTMLElement {
  const root = el(doc, "div", "profile-summary");
  root.appendChild(el(doc, "h2", undefined, profile.display_name));
  const dl = el(doc, "dl");
  const pair = (term: string, values: string[]) => {
    dl.appendChild(el(doc, "dt", undefined, term));
    dl.appendChild(el(doc, "dd", undefined, values.length ? values.join(", ") : "none"));
  };
  pair("Conditions", profile.conditions);
  pair("Restrictions", profile.restrictions);
  pair("Goals", profile.goals);
  root.appendChild(dl);
  return root;
}

/** Red banner for a failed request; shows a retry button when the
 * failure is retriable (offline service, upstream detector trouble). */
export function renderErrorBanner(
  doc: Document,
  message: string,
  retriable: boolean,
  onRetry?: () => void,
): HTMLElement {
  const banner = el(doc, "div", "error-banner", message);
  if (retriable && onRetry) {
    const retry = el(doc, "button", "retry-button", "Retry");
    retry.type = "button";
    retry.addEventListener("click", onRetry);
    banner.appendChild(retry);
  }
  return banner;
}
