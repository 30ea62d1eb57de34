/**
 * Attention heatmaps as standalone SVG files: one colored cell per
 * (query token, article token) pair, axes labeled with the tokens.
 */

import { mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";
import type { AttentionExport } from "./io.js";

const CELL = 18;
const MARGIN_LEFT = 110;
const MARGIN_TOP = 110;

function cellColor(value: number): string {
  // white -> deep blue
  const v = Math.max(0, Math.min(1, value));
  const r = Math.round(255 - v * (255 - 31));
  const g = Math.round(255 - v * (255 - 119));
  const b = Math.round(255 - v * (255 - 180));
  return `rgb(${r},${g},${b})`;
}

function escapeXml(s: string): string {
  return s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

export function renderAttentionSvg(exp: AttentionExport): string {
  const rows = exp.q_tokens.length;
  const cols = exp.a_tokens.length;
  const width = MARGIN_LEFT + cols * CELL;
  const height = MARGIN_TOP + rows * CELL;
  const parts: string[] = [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
    `viewBox="0 0 ${width} ${height}" font-family="monospace" font-size="10">`,
    `<rect width="${width}" height="${height}" fill="white"/>`,
  ];
  for (let r = 0; r < rows; r++) {
    for (let c = 0; c < cols; c++) {
      const x = MARGIN_LEFT + c * CELL;
      const y = MARGIN_TOP + r * CELL;
      parts.push(
        `<rect x="${x}" y="${y}" width="${CELL}" height="${CELL}" ` +
        `fill="${cellColor(exp.matrix[r][c])}" stroke="#ddd"/>`,
      );
    }
  }
  for (let r = 0; r < rows; r++) {
    const y = MARGIN_TOP + r * CELL + CELL / 2 + 3;
    parts.push(
      `<text x="${MARGIN_LEFT - 6}" y="${y}" text-anchor="end">` +
      `${escapeXml(exp.q_tokens[r])}</text>`,
    );
  }
  for (let c = 0; c < cols; c++) {
    const x = MARGIN_LEFT + c * CELL + CELL / 2;
    parts.push(
      `<text x="${x}" y="${MARGIN_TOP - 6}" text-anchor="start" ` +
      `transform="rotate(-60 ${x} ${MARGIN_TOP - 6})">` +
      `${escapeXml(exp.a_tokens[c])}</text>`,
    );
  }
  parts.push("</svg>");
  return parts.join("\n") + "\n";
}

export function writeHeatmaps(dir: string, exports_: AttentionExport[]): string[] {
  mkdirSync(dir, { recursive: true });
  const written: string[] = [];
  for (const exp of exports_) {
    const path = join(dir, `${exp.qid.replace(/[^A-Za-z0-9_-]/g, "_")}.svg`);
    writeFileSync(path, renderAttentionSvg(exp));
    written.push(path);
  }
  return written;
}
