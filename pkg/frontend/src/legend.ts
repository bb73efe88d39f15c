/**
 * The six-state glyph legend. The Record type keeps the mapping exhaustive:
 * adding a CellStateName without a style rule fails the build.
 */

import type { CellStateName } from './types';

export interface LegendEntry {
  label: string;
  className: string;
  /** fill/border scheme used by the stylesheet and the SVG export. */
  swatch: string;
}

export const LEGEND: Record<CellStateName, LegendEntry> = {
  unchanged: { label: 'unchanged value', className: 'cell--unchanged', swatch: 'gray' },
  modified: { label: 'modified value', className: 'cell--modified', swatch: 'blue' },
  added: { label: 'added value', className: 'cell--added', swatch: 'purple' },
  removed: { label: 'removed value', className: 'cell--removed', swatch: 'red-border' },
  not_present: { label: 'value not present', className: 'cell--not-present', swatch: 'gray-border' },
  query_match: { label: 'matches the query', className: 'cell--query-match', swatch: 'yellow-border' },
};

export const LEGEND_ORDER: CellStateName[] = [
  'unchanged',
  'modified',
  'added',
  'removed',
  'not_present',
  'query_match',
];
