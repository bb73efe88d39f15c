/**
 * SnapGrid rendering: the bounded grid of cell glyphs with previous and new
 * values, relationship boxes around related columns, per-column overflow
 * counts, and the collapsible six-state legend.
 */

import { classes, escapeHtml } from './html';
import { LEGEND, LEGEND_ORDER } from './legend';
import type { GridCell, SnapGridData } from './types';

function cellText(cell: GridCell): string {
  switch (cell.state) {
    case 'modified':
      return `${escapeHtml(cell.old_display ?? '')} <span class="arrow">→</span> ${escapeHtml(
        cell.new_display ?? '',
      )}`;
    case 'removed':
      return escapeHtml(cell.old_display ?? '');
    case 'not_present':
      return '';
    default:
      return escapeHtml(cell.new_display ?? cell.old_display ?? '');
  }
}

function boxRole(column: string, grid: SnapGridData): 'source' | 'derived' | null {
  for (const box of grid.relationship_boxes) {
    if (box.source === column) return 'source';
    if (box.derived.includes(column)) return 'derived';
  }
  return null;
}

export function renderLegend(): string {
  const items = LEGEND_ORDER.map((state) => {
    const entry = LEGEND[state];
    return (
      `<li class="legend__item" data-state="${state}">` +
      `<span class="legend__swatch ${entry.className}" data-swatch="${entry.swatch}"></span>` +
      `${escapeHtml(entry.label)}</li>`
    );
  }).join('');
  return (
    '<details class="legend" open>' +
    '<summary>Legend</summary>' +
    `<ul class="legend__items">${items}</ul>` +
    '</details>'
  );
}

export function renderSnapGrid(grid: SnapGridData): string {
  const header = grid.columns
    .map((column) => {
      const role = boxRole(column, grid);
      const overflow = grid.overflow[column];
      const overflowHtml =
        overflow !== undefined
          ? `<span class="overflow" title="changed values in this column">${overflow} changed</span>`
          : '';
      return (
        `<th class="${classes('col', role && `col--box-${role}`)}" data-column="${escapeHtml(column)}">` +
        `${overflowHtml}<span class="col__name">${escapeHtml(column)}</span></th>`
      );
    })
    .join('');

  const body = grid.rows
    .map((rowId, i) => {
      const cells = grid.cells[i]
        .map((cell, j) => {
          const entry = LEGEND[cell.state];
          const column = grid.columns[j];
          const role = boxRole(column, grid);
          return (
            `<td class="${classes('cell', entry.className, cell.in_relationship_box && role ? `cell--box-${role}` : cell.in_relationship_box ? 'cell--box' : undefined)}" ` +
            `data-state="${cell.state}">${cellText(cell)}</td>`
          );
        })
        .join('');
      return `<tr><th class="row-id" scope="row">${rowId}</th>${cells}</tr>`;
    })
    .join('');

  return (
    '<figure class="snapgrid" data-legend-version="' +
    escapeHtml(grid.legend_version) +
    '">' +
    `<table class="snapgrid__table"><thead><tr><th class="corner"></th>${header}</tr></thead>` +
    `<tbody>${body}</tbody></table>` +
    renderLegend() +
    '</figure>'
  );
}
