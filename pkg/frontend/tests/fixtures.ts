import { readFileSync } from 'node:fs';
import { dirname, join } from 'node:path';
import { fileURLToPath } from 'node:url';

import type { ColumnStats, FramePage, QueryResponse, SyncDelta } from '../src/types';

const FIXTURES = join(dirname(fileURLToPath(import.meta.url)), '..', 'fixtures');

function load<T>(name: string): T {
  return JSON.parse(readFileSync(join(FIXTURES, name), 'utf-8')) as T;
}

export const deltaLog = (): SyncDelta[] => load<SyncDelta[]>('delta_log.json');
export const queryResponse = (): QueryResponse => load<QueryResponse>('query_response.json');
export const queryError = (): { status: number; detail: string } => load('query_error.json');
export const writingStats = (): ColumnStats => load<ColumnStats>('stats_writing.json');
export const parentStats = (): ColumnStats => load<ColumnStats>('stats_parent.json');
export const framePage = (): FramePage => load<FramePage>('frame_page.json');
