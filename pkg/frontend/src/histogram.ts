/**
 * Column statistics: thumbnail histograms for column headers and the
 * expanded side-panel with moments or category counts.
 */

import { escapeHtml } from './html';
import type { ColumnStats, NumericColumnStats } from './types';

const THUMB_WIDTH = 96;
const THUMB_HEIGHT = 28;

function bars(counts: number[]): string {
  const max = Math.max(1, ...counts);
  const barWidth = THUMB_WIDTH / Math.max(1, counts.length);
  return counts
    .map((count, i) => {
      const height = Math.round((count / max) * (THUMB_HEIGHT - 2));
      const x = (i * barWidth).toFixed(1);
      const y = THUMB_HEIGHT - height;
      return `<rect x="${x}" y="${y}" width="${(barWidth - 1).toFixed(1)}" height="${height}"></rect>`;
    })
    .join('');
}

function statCounts(stats: ColumnStats): number[] {
  if (stats.dtype === 'numeric') {
    return stats.bins.map(([, , count]) => count);
  }
  return Object.values(stats.categories);
}

export function renderHistogramThumbnail(stats: ColumnStats): string {
  return (
    `<svg class="histogram-thumb" role="img" data-column="${escapeHtml(stats.column)}" ` +
    `viewBox="0 0 ${THUMB_WIDTH} ${THUMB_HEIGHT}" width="${THUMB_WIDTH}" height="${THUMB_HEIGHT}">` +
    bars(statCounts(stats)) +
    '</svg>'
  );
}

function formatNumber(value: number | null): string {
  if (value === null) return '—';
  return Number.isInteger(value) ? String(value) : value.toFixed(3);
}

function numericRows(stats: NumericColumnStats): string {
  return (
    `<tr><th>mean</th><td>${formatNumber(stats.mean)}</td></tr>` +
    `<tr><th>median</th><td>${formatNumber(stats.median)}</td></tr>` +
    `<tr><th>std</th><td>${formatNumber(stats.std)}</td></tr>`
  );
}

export function renderStatsPanel(stats: ColumnStats): string {
  const detailRows =
    stats.dtype === 'numeric'
      ? numericRows(stats)
      : Object.entries(stats.categories)
          .map(([label, count]) => `<tr><th>${escapeHtml(label)}</th><td>${count}</td></tr>`)
          .join('');
  return (
    `<section class="stats-panel" data-column="${escapeHtml(stats.column)}">` +
    `<h3>Column Stats: ${escapeHtml(stats.column)}</h3>` +
    renderHistogramThumbnail(stats) +
    '<table class="stats-panel__table"><tbody>' +
    detailRows +
    `<tr><th>missing</th><td>${stats.missing_count}</td></tr>` +
    `<tr><th>rows</th><td>${stats.row_count}</td></tr>` +
    '</tbody></table></section>'
  );
}
