import { NO_VERDICT_COLOR, VERDICT_COLORS } from "./colors.js";
import { defeaterSubtree, layoutCase } from "./layout.js";
import type { CaseViewModel } from "./viewmodel.js";
import type { NodePayload } from "./types.js";

const CELL_W = 190;
const CELL_H = 120;
const NODE_W = 150;
const NODE_H = 58;

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

function wrap(text: string, width = 24, lines = 3): string[] {
  const words = text.split(/\s+/).filter(Boolean);
  const out: string[] = [];
  let line = "";
  for (const word of words) {
    if ((line + " " + word).trim().length > width && line) {
      out.push(line);
      line = word;
    } else {
      line = (line + " " + word).trim();
    }
    if (out.length === lines) break;
  }
  if (line && out.length < lines) out.push(line);
  if (out.length === lines && words.join(" ").length > out.join(" ").length) {
    out[lines - 1] = out[lines - 1].slice(0, width - 1) + "…";
  }
  return out;
}

function center(x: number, y: number): [number, number] {
  return [x * CELL_W + CELL_W / 2, y * CELL_H + CELL_H / 2];
}

function labelOf(node: NodePayload): string {
  return node.text ?? node.description ?? node.case_ref ?? node.id;
}

/** Render the whole workbench drawing as an SVG string. */
export function renderSvg(vm: CaseViewModel): string {
  if (!vm.document) return "<svg xmlns='http://www.w3.org/2000/svg'></svg>";
  const document = vm.document;
  const hidden = vm.hiddenIds();
  const layout = layoutCase(document, hidden);
  const byId = new Map(layout.nodes.map((n) => [n.id, n]));
  const nodeById = new Map(document.case.nodes.map((n) => [n.id, n]));
  const blockById = new Map(document.case.blocks.map((b) => [b.id, b]));
  const width = Math.max(3, layout.columns) * CELL_W + 40;
  const height = Math.max(2, layout.rows) * CELL_H + 110;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}" font-family="sans-serif">`,
  );
  parts.push(
    `<defs><marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="7" markerHeight="7" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#546e7a"/></marker>` +
      `<marker id="defeat-arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="8" markerHeight="8" orient="auto-start-reverse"><path d="M 0 0 L 10 5 L 0 10 z" fill="#b71c1c"/></marker></defs>`,
  );

  // Tinted backdrops isolating visible defeater subcases.
  for (const node of document.case.nodes) {
    if (node.type !== "defeater" || hidden.has(node.id)) continue;
    const members = [node.id, ...defeaterSubtree(document, node.id)].filter(
      (id) => byId.has(id) && !hidden.has(id),
    );
    if (members.length < 2) continue;
    const xs = members.map((id) => byId.get(id)!.x);
    const ys = members.map((id) => byId.get(id)!.y);
    const x0 = Math.min(...xs) * CELL_W + 8;
    const y0 = Math.min(...ys) * CELL_H + 8;
    const x1 = (Math.max(...xs) + 1) * CELL_W - 8;
    const y1 = (Math.max(...ys) + 1) * CELL_H - 8;
    parts.push(
      `<rect data-subcase-of="${esc(node.id)}" x="${x0}" y="${y0}" width="${x1 - x0}" height="${y1 - y0}" rx="14" fill="#fbe9e7" opacity="0.45"/>`,
    );
  }

  for (const edge of layout.edges) {
    const from = byId.get(edge.from);
    const to = byId.get(edge.to);
    if (!from || !to) continue;
    const [x1, y1] = center(from.x, from.y);
    const [x2, y2] = center(to.x, to.y);
    const style =
      edge.kind === "defeat"
        ? 'stroke="#b71c1c" stroke-dasharray="6 4" marker-end="url(#defeat-arrow)" stroke-width="2"'
        : edge.kind === "sideclaim"
          ? 'stroke="#546e7a" stroke-dasharray="2 4" marker-end="url(#arrow)"'
          : edge.kind === "support"
            ? 'stroke="#546e7a"'
            : 'stroke="#546e7a" marker-end="url(#arrow)"';
    parts.push(
      `<line data-edge="${edge.kind}" x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" ${style} fill="none"/>`,
    );
  }

  for (const placed of layout.nodes) {
    const [cx, cy] = center(placed.x, placed.y);
    const selected = vm.selection === placed.id;
    const previewed = vm.isPreviewed(placed.id);
    const outline = previewed
      ? 'stroke-dasharray="7 4" stroke-width="3"'
      : selected
        ? 'stroke-width="3.5"'
        : 'stroke-width="1.6"';
    if (placed.element === "block") {
      const block = blockById.get(placed.id)!;
      let label = block.kind.replace(/_/g, " ");
      if (block.decomposition_mode) label += ` (${block.decomposition_mode})`;
      parts.push(
        `<g data-node-id="${esc(placed.id)}" cursor="pointer">` +
          `<rect x="${cx - NODE_W / 2}" y="${cy - 22}" width="${NODE_W}" height="44" rx="10" fill="#ffffff" stroke="#37474f" ${outline}/>` +
          `<text x="${cx}" y="${cy + 4}" text-anchor="middle" font-size="11">${esc(label)}</text></g>`,
      );
      continue;
    }
    const node = nodeById.get(placed.id)!;
    const fill = node.type === "evidence" ? NO_VERDICT_COLOR : vm.colorOf(placed.id);
    const stroke =
      node.type === "defeater" ? "#b71c1c" : node.type === "external" ? "#6a1b9a" : "#1565c0";
    const lines = wrap(labelOf(node));
    const text = lines
      .map(
        (line, i) =>
          `<text x="${cx}" y="${cy - 6 + i * 13 - (lines.length - 1) * 5}" text-anchor="middle" font-size="10.5">${esc(line)}</text>`,
      )
      .join("");
    let shape: string;
    if (node.type === "claim" || node.type === "defeater") {
      const dash = node.designation === "assumption" ? 'stroke-dasharray="5 3"' : "";
      shape = `<ellipse cx="${cx}" cy="${cy}" rx="${NODE_W / 2}" ry="${NODE_H / 2}" fill="${fill}" stroke="${stroke}" ${outline} ${dash}/>`;
    } else if (node.type === "evidence") {
      const corner = `M ${cx + NODE_W / 2 - 14} ${cy - NODE_H / 2} l 14 14`;
      shape =
        `<rect x="${cx - NODE_W / 2}" y="${cy - NODE_H / 2}" width="${NODE_W}" height="${NODE_H}" fill="${fill}" stroke="#455a64" ${outline}/>` +
        `<path d="${corner}" stroke="#455a64" fill="none"/>`;
    } else {
      shape = `<rect x="${cx - NODE_W / 2}" y="${cy - NODE_H / 2}" width="${NODE_W}" height="${NODE_H}" rx="4" fill="${fill}" stroke="${stroke}" ${outline}/>`;
    }
    const badges: string[] = [];
    if (node.type === "defeater" && node.status && node.status !== "active") {
      badges.push(
        `<text x="${cx}" y="${cy + NODE_H / 2 + 12}" text-anchor="middle" font-size="9" fill="#b71c1c">${esc(node.status)}</text>`,
      );
    }
    if (node.type === "evidence") {
      badges.push(
        `<text x="${cx}" y="${cy + NODE_H / 2 + 12}" text-anchor="middle" font-size="9" fill="#455a64">${node.present === false ? "absent" : "present"}</text>`,
      );
    }
    const error = vm.inlineErrors[placed.id];
    if (error) {
      badges.push(
        `<text data-error-for="${esc(placed.id)}" x="${cx}" y="${cy - NODE_H / 2 - 6}" text-anchor="middle" font-size="9" fill="#c62828">${esc(error.slice(0, 60))}</text>`,
      );
    }
    parts.push(
      `<g data-node-id="${esc(placed.id)}" cursor="pointer">${shape}${text}${badges.join("")}</g>`,
    );
  }

  // Legend: the three verdict colors, always visible.
  const legendY = height - 34;
  let legendX = 16;
  parts.push(`<g data-legend="true" font-size="11">`);
  for (const [verdict, color] of Object.entries(VERDICT_COLORS)) {
    parts.push(
      `<rect x="${legendX}" y="${legendY}" width="14" height="14" fill="${color}" stroke="#555"/>` +
        `<text x="${legendX + 20}" y="${legendY + 11}">${verdict}</text>`,
    );
    legendX += 120;
  }
  parts.push(`</g>`);
  parts.push("</svg>");
  return parts.join("\n");
}
