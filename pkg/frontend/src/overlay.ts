import type { DetectionBox } from "./types.js";

export interface Size {
  width: number;
  height: number;
}

export interface DisplayRect {
  left: number;
  top: number;
  width: number;
  height: number;
}

/**
 * Map a detection box from source-image coordinates into the coordinate
 * space of the displayed image. Pure linear scaling: doubling the display
 * size doubles every output field.
 */
export function scaleBox(box: DetectionBox, natural: Size, display: Size): DisplayRect {
  if (natural.width <= 0 || natural.height <= 0) {
    throw new RangeError("natural image size must be positive");
  }
  const sx = display.width / natural.width;
  const sy = display.height / natural.height;
  return {
    left: box.x * sx,
    top: box.y * sy,
    width: box.w * sx,
    height: box.h * sy,
  };
}

/**
 * Build absolutely-positioned overlay elements for each box, labeled with
 * the prompt phrase and the server's confidence value rendered verbatim.
 */
export function buildOverlays(
  doc: Document,
  boxes: DetectionBox[],
  natural: Size,
  display: Size,
): HTMLElement[] {
  return boxes.map((box) => {
    const rect = scaleBox(box, natural, display);
    const el = doc.createElement("div");
    el.className = "overlay-box";
    el.style.position = "absolute";
    el.style.left = `${rect.left}px`;
    el.style.top = `${rect.top}px`;
    el.style.width = `${rect.width}px`;
    el.style.height = `${rect.height}px`;
    const tag = doc.createElement("span");
    tag.className = "overlay-label";
    tag.textContent = `${box.label} ${box.confidence}`;
    el.appendChild(tag);
    return el;
  });
}
