/**
 * Wire types for the sync-service JSON API.
 *
 * These mirror the documented schemas: cards from GET /history and /poll,
 * comments, deltas, column stats, frame pages, and query responses.
 */

export type CellStateName =
  | 'unchanged'
  | 'modified'
  | 'added'
  | 'removed'
  | 'not_present'
  | 'query_match';

export interface GridCell {
  state: CellStateName;
  in_relationship_box: boolean;
  old?: unknown;
  new?: unknown;
  old_display?: string;
  new_display?: string;
}

export interface RelationshipBox {
  source: string;
  derived: string[];
}

export interface SnapGridData {
  rows: number[];
  columns: string[];
  cells: GridCell[][];
  overflow: Record<string, number>;
  relationship_boxes: RelationshipBox[];
  legend_version: string;
  warnings: string[];
}

export interface MetricEntry {
  name: string;
  variable: string;
  value: number | null;
}

export interface ModelMetadata {
  model_name: string;
  train_variables: string[];
  test_variables: string[];
  metrics: MetricEntry[];
}

export interface CardChanges {
  added_columns: string[];
  removed_columns: string[];
  added_rows: number[];
  removed_rows: number[];
  modified_cell_count: number;
  full_replacement: boolean;
}

export interface Card {
  variable: string;
  version: number;
  summary: string;
  operation_kind: string;
  snapgrid: SnapGridData;
  model_metadata: ModelMetadata | null;
  relationships: Record<string, string[]>;
  changes: CardChanges;
  created_at: string;
  comment_count: number;
  has_unread: boolean;
}

export interface CommentData {
  id: string;
  variable: string;
  version: number;
  author_role: string;
  text: string;
  created_at: string;
  read_by: string[];
}

export interface SyncDelta {
  cards: Card[];
  comments: CommentData[];
  unread: Record<string, boolean>;
  next_cursor: number;
  notifications: string[];
  poll_seconds: number;
  resync: boolean;
}

export interface NumericColumnStats {
  column: string;
  dtype: 'numeric';
  row_count: number;
  missing_count: number;
  bins: [number, number, number][];
  mean: number | null;
  median: number | null;
  std: number | null;
}

export interface CategoricalColumnStats {
  column: string;
  dtype: 'categorical' | 'boolean' | 'text';
  row_count: number;
  missing_count: number;
  categories: Record<string, number>;
}

export type ColumnStats = NumericColumnStats | CategoricalColumnStats;

export interface FramePage {
  variable: string;
  version: number;
  columns: { name: string; dtype: string }[];
  row_ids: number[];
  rows: unknown[][];
  total_rows: number;
  offset: number;
}

export interface FilterConditionData {
  column: string;
  operator: string;
  value: unknown;
}

export interface QueryResponse {
  conditions: FilterConditionData[];
  matching_row_ids: number[];
  matching_cells: [number, string][];
  snapgrid: SnapGridData;
}
