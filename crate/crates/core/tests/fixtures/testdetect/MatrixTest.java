package org.example.t7;

import org.junit.Test;
import static org.junit.Assert.assertEquals;

public class MatrixTest {
    private int helper() { return 7; }

    @Test
    public void multipliesIdentity() {
        assertEquals(7, helper());
    }
}
