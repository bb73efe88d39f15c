export * from './types';
export * from './state';
export * from './legend';
export * from './html';
export * from './snapgrid';
export * from './histogram';
export * from './metrics';
export * from './comments';
export * from './cards';
export * from './queryBox';
export * from './dashboard';
