# imports
import numpy as np
from sklearn.linear_model import LinearRegression
from sklearn.metrics import mean_squared_error
from sklearn.metrics import mean_absolute_error
# Generate some sample data
X_train = np.array([[1], [2], [3], [4], [5]])
Y_train = np.array([3, 5, 7, 9, 11])
# Train a linear regression model
reg =  LinearRegression().fit(X_train, Y_train)
# Test variables
X_test = np.array([6], [7])
y_test = ([13, 15])
y_test_pred = reg.predict(X_test)
# Calculate the mean squared error for the test data
mse_test = mean_squared_error(y_test, y_test_pred)
print("Mean squared error for test data:", mse_test)
# Calculate the mean absolute error for the test data
mae_test = mean_squared_error(y_test, y_test_pred)
print("Mean absolute error for test data:", mse_test)
